//! Fixture builders shared by the integration suites.

// Each suite uses its own subset of these helpers.
#![allow(dead_code)]

use chrono::NaiveDate;
use primevent::burst::BurstMatrix;
use primevent::clustering::WindowClusters;
use primevent::corpus::{
    ingest_documents, partition_windows, preprocess, Document, DocumentSet, IndexSeries,
    WindowedCorpus,
};
use primevent::events::PrimingEvent;
use primevent::pipeline::{analyze, Analysis, PipelineConfig};
use primevent::synth::{generate, SpanSpec, SynthConfig};
use primevent::volatility::ProbVolatility;

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").expect("valid date literal")
}

/// A weekly index of `windows` rows starting 2021-01-04, all values 100.
/// Each row starts one window (the last extends a median length past the
/// final row), so this defines exactly `windows` windows. Needs
/// `windows >= 2`.
pub fn flat_weekly_index(windows: usize) -> IndexSeries {
    let rows: Vec<(NaiveDate, f64)> = (0..windows)
        .map(|i| (date("2021-01-04") + chrono::Duration::days(7 * i as i64), 100.0))
        .collect();
    IndexSeries::from_rows(&rows).expect("valid index rows")
}

/// A corpus over `windows` weekly windows whose documents carry the given
/// tokens verbatim (no normalization or day filtering).
pub fn corpus_from_docs(windows: usize, docs: Vec<Document>) -> WindowedCorpus {
    let index = flat_weekly_index(windows);
    let set = DocumentSet {
        docs,
        dropped_out_of_span: 0,
    };
    partition_windows(set, &index).expect("partition fixture docs")
}

/// The grouping-flip fixture: three features whose document overlaps,
/// burst-series angles, and bursty-window masses are set so that pure
/// text coherence prefers {union, worker} while influence weighting
/// prefers {wage, worker}.
///
/// Hand-built targets: doc similarities J(worker,union) = 0.31 and
/// J(worker,wage) = 0.35; burst-series cosines 0.25 and 0.1; influence
/// weights 30 and 74 for the two pairs under a unit volatility weight.
pub struct GroupingFlip {
    pub corpus: WindowedCorpus,
    pub bursts: BurstMatrix,
    pub pvi: ProbVolatility,
    pub worker: usize,
    pub union: usize,
    pub wage: usize,
}

pub fn grouping_flip_fixture() -> GroupingFlip {
    let day = date("2021-01-04");
    // 134 documents in window 0. Membership ranges give the Jaccard
    // targets: worker ∈ [0,66), union ∈ [35,100), wage ∈ [0,35)∪[100,134)
    // → J(worker,union) = 31/100, J(worker,wage) = 35/100, J(union,wage) = 0.
    let docs: Vec<Document> = (0..134)
        .map(|d| {
            let mut tokens = Vec::new();
            if d < 66 {
                tokens.push("worker".to_string());
            }
            if (35..100).contains(&d) {
                tokens.push("union".to_string());
            }
            if d < 35 || d >= 100 {
                tokens.push("wage".to_string());
            }
            Document {
                id: format!("d{d:03}"),
                date: day,
                tokens,
            }
        })
        .collect();
    let windows = 102;
    let corpus = corpus_from_docs(windows, docs);
    let worker = corpus.feature_id("worker").expect("worker in vocabulary");
    let union = corpus.feature_id("union").expect("union in vocabulary");
    let wage = corpus.feature_id("wage").expect("wage in vocabulary");

    // Burst series live on the first three windows only; the vectors are
    // unit-norm with pairwise cosines 0.25 (worker,union), 0.1
    // (worker,wage), and 0 (union,wage).
    let mut series = vec![vec![0.0; windows]; 3];
    series[worker][0] = 0.9275f64.sqrt();
    series[worker][1] = 0.25;
    series[worker][2] = 0.1;
    series[union][1] = 1.0;
    series[wage][2] = 1.0;

    // Bursty-window masses are set independently of the series shapes:
    // 2 + 28 windows for {worker, union}, 2 + 72 for {worker, wage}.
    let mut bursty_windows = vec![Vec::new(); 3];
    bursty_windows[worker] = vec![0, 1];
    bursty_windows[union] = (2..30).collect();
    bursty_windows[wage] = (30..102).collect();

    let bursts = BurstMatrix {
        features: corpus.features.clone(),
        series,
        expected_rate: vec![0.5; 3],
        bursty_windows,
        threshold: 0.9,
    };

    let pvi = ProbVolatility {
        pvi: vec![1.0; windows],
        logistic_mu: 0.0,
        logistic_s: 1.0,
        bins: 10,
    };
    GroupingFlip {
        corpus,
        bursts,
        pvi,
        worker,
        union,
        wage,
    }
}

/// The planted-event recovery fixture: 50 windows, 200-feature
/// vocabulary, two disjoint planted bursts with index spikes shifted by
/// `spike_offset` windows (0 = co-located), four burst-only distractor
/// spans, and two burst-free spikes. Deterministic for the fixed seed.
pub fn planted_fixture(spike_offset: i64) -> SynthConfig {
    SynthConfig {
        windows: 50,
        vocab: 200,
        noise: 0.0,
        seed: 2,
        spike_offset,
        plants: vec![
            SpanSpec {
                begin: 8,
                end: 16,
                features: (0..8).collect(),
            },
            SpanSpec {
                begin: 28,
                end: 36,
                features: (8..16).collect(),
            },
        ],
        distractors: vec![
            SpanSpec {
                begin: 3,
                end: 5,
                features: (16..24).collect(),
            },
            SpanSpec {
                begin: 17,
                end: 19,
                features: (24..32).collect(),
            },
            SpanSpec {
                begin: 37,
                end: 39,
                features: (32..40).collect(),
            },
            SpanSpec {
                begin: 46,
                end: 48,
                features: (40..48).collect(),
            },
        ],
        spikes: vec![(1, 2), (44, 45)],
        ..SynthConfig::default()
    }
}

/// A small fixture with overlapping burst spans, so some windows hold two
/// bursty topics and the clustering, path probing, and Sign bookkeeping
/// all have real work to do.
pub fn overlapping_fixture() -> SynthConfig {
    SynthConfig {
        windows: 30,
        vocab: 80,
        noise: 0.0,
        seed: 11,
        plants: vec![SpanSpec {
            begin: 5,
            end: 15,
            features: (0..8).collect(),
        }],
        distractors: vec![
            SpanSpec {
                begin: 9,
                end: 13,
                features: (8..16).collect(),
            },
            SpanSpec {
                begin: 20,
                end: 24,
                features: (16..24).collect(),
            },
        ],
        spikes: vec![(26, 27)],
        ..SynthConfig::default()
    }
}

/// Builds the windowed corpus and index for a synthetic fixture through
/// the same ingestion path the pipeline uses.
pub fn synth_inputs(config: &SynthConfig) -> (WindowedCorpus, IndexSeries) {
    let fixture = generate(config).expect("generate fixture");
    let index = IndexSeries::from_reader(fixture.index_csv.as_bytes()).expect("parse index");
    let docs =
        ingest_documents(fixture.documents_jsonl.as_bytes(), &index).expect("ingest documents");
    let corpus = partition_windows(preprocess(docs), &index).expect("partition windows");
    (corpus, index)
}

/// Runs the full pipeline over an in-memory synthetic fixture.
pub fn analyze_synth(config: &SynthConfig, pipeline: &PipelineConfig) -> Analysis {
    let (corpus, index) = synth_inputs(config);
    analyze(&corpus, &index, pipeline).expect("analyze fixture")
}

/// The topic indices an event's clusters cover, ascending.
pub fn event_topics(event: &PrimingEvent, clusters: &WindowClusters) -> Vec<usize> {
    let mut out: Vec<usize> = event
        .clusters_by_window
        .iter()
        .enumerate()
        .flat_map(|(offset, ids)| {
            ids.iter()
                .flat_map(move |&c| clusters[event.begin + offset][c].topic_ids.iter().copied())
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Jaccard overlap of two inclusive window ranges.
pub fn window_jaccard(a: (usize, usize), b: (usize, usize)) -> f64 {
    let inter = a.1.min(b.1) as i64 - a.0.max(b.0) as i64 + 1;
    if inter <= 0 {
        return 0.0;
    }
    inter as f64 / (a.1.max(b.1) - a.0.min(b.0) + 1) as f64
}
