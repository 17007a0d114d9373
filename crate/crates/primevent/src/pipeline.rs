//! End-to-end orchestration: pipeline configuration, the run/compare
//! drivers behind the command-line interface, and the report writers.
//!
//! A run reads a document stream and an index series, executes the full
//! analysis (bursts → volatility → topics → per-window clusters →
//! events), and writes four report files into the output directory:
//! `topics.csv`, `events.json`, `plot.csv`, and `manifest.json`. All
//! randomness flows from the single configured seed through a
//! counter-based per-stage split, so a rerun on identical inputs
//! produces byte-identical reports.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::burst::{burst_series, BurstMatrix};
use crate::clustering::{cluster_windows, ClusterConfig, WindowClusters};
use crate::corpus::{
    ingest_documents, partition_windows, preprocess, IndexSeries, WindowedCorpus,
};
use crate::error::{Error, Result};
use crate::events::{discover_priming_events, EventConfig, PrimingEvent};
use crate::topics::{extract_topics, Topic};
use crate::volatility::{
    fit_logistic, log_returns, probabilize, volatility_series, ProbVolatility, PviMode,
    VolatilitySeries,
};

/// Every knob of the analysis pipeline. The file form is a flat JSON
/// object with exactly these keys; each key is also a command-line flag
/// (`--burst-threshold 0.8`), and flags override file values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Cumulative probability at or above which a window counts as
    /// bursty.
    pub burst_threshold: f64,
    /// Trailing windows in the rolling volatility estimate.
    pub volatility_horizon: usize,
    /// Quantization bins for the probabilized volatility index.
    pub pvi_bins: usize,
    /// Quantized (bin upper bound) or continuous (raw CDF) volatility
    /// weights.
    pub pvi_mode: PviMode,
    /// Largest feature count a topic may grow to.
    pub topic_size_cap: usize,
    /// Largest cluster count tried per window.
    pub kmax: usize,
    /// Independent K-means starts per cluster count.
    pub kmeans_restarts: usize,
    /// Similarity threshold linking clusters across adjacent windows.
    pub sigma: f64,
    /// Overlap threshold for grouping cluster paths into one event.
    pub tau: f64,
    /// Root RNG seed; each random stage derives its own stream from it.
    pub seed: u64,
    /// Score topics and events without index weighting.
    pub baseline: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            burst_threshold: 0.9,
            volatility_horizon: 4,
            pvi_bins: 10,
            pvi_mode: PviMode::Quantized,
            topic_size_cap: 8,
            kmax: 8,
            kmeans_restarts: 5,
            sigma: 0.2,
            tau: 0.5,
            seed: 0,
            baseline: false,
        }
    }
}

impl PipelineConfig {
    /// Rejects values the downstream stages cannot accept: thresholds
    /// must be strict probabilities, the volatility horizon needs at
    /// least two windows and the quantizer at least two bins.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("burst_threshold", self.burst_threshold),
            ("sigma", self.sigma),
            ("tau", self.tau),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::invalid(format!(
                    "{name} must lie strictly between 0 and 1, got {value}"
                )));
            }
        }
        for (name, value, least) in [
            ("volatility_horizon", self.volatility_horizon, 2),
            ("pvi_bins", self.pvi_bins, 2),
            ("topic_size_cap", self.topic_size_cap, 1),
            ("kmax", self.kmax, 1),
            ("kmeans_restarts", self.kmeans_restarts, 1),
        ] {
            if value < least {
                return Err(Error::invalid(format!(
                    "{name} must be at least {least}, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Loads a flat JSON config file; errors name the file and, for
    /// malformed JSON, the offending line.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let config: PipelineConfig = serde_json::from_str(&text).map_err(|e| {
            Error::invalid(format!("{}: line {}: {e}", path.display(), e.line()))
        })?;
        config.validate()?;
        Ok(config)
    }
}

/// Pipeline stages that consume randomness. Each stage seeds its own RNG
/// stream from the root seed and its counter, so adding a stage never
/// perturbs the streams of existing ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Per-window K-means topic clustering.
    Clustering = 0,
    /// Synthetic fixture generation.
    Synthesis = 1,
}

/// Derives a stage's RNG seed from the root seed (splitmix64 finalizer
/// over root + stage counter).
pub fn stage_seed(root: u64, stage: Stage) -> u64 {
    let mut z = root.wrapping_add((stage as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Everything one pipeline pass computes, kept for report writing and
/// diagnostics.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub bursts: BurstMatrix,
    pub vi: VolatilitySeries,
    pub pvi: ProbVolatility,
    pub topics: Vec<Topic>,
    pub clusters: WindowClusters,
    pub events: Vec<PrimingEvent>,
}

/// Runs the full analysis over an already-windowed corpus and its index.
pub fn analyze(
    corpus: &WindowedCorpus,
    index: &IndexSeries,
    config: &PipelineConfig,
) -> Result<Analysis> {
    config.validate()?;
    let bursts = burst_series(corpus, config.burst_threshold, false)?;
    let returns = log_returns(index)?;
    let vi = volatility_series(&returns, config.volatility_horizon)?;
    let params = fit_logistic(&vi)?;
    let pvi = probabilize(&vi, params, config.pvi_bins, config.pvi_mode)?;
    let topics = extract_topics(corpus, &bursts, &pvi, config.topic_size_cap, config.baseline)?;
    let event_config = EventConfig {
        sigma: config.sigma,
        tau: config.tau,
        baseline: config.baseline,
        cluster: ClusterConfig {
            kmax: config.kmax,
            restarts: config.kmeans_restarts,
            seed: stage_seed(config.seed, Stage::Clustering),
            ..ClusterConfig::default()
        },
    };
    let clusters = cluster_windows(&topics, corpus, &event_config.cluster)?;
    let events = discover_priming_events(corpus, &topics, &pvi, &event_config)?;
    Ok(Analysis {
        bursts,
        vi,
        pvi,
        topics,
        clusters,
        events,
    })
}

/// Parsed inputs plus the SHA-256 of each file's raw bytes, for the run
/// manifest.
pub struct LoadedInputs {
    pub corpus: WindowedCorpus,
    pub index: IndexSeries,
    pub docs_digest: String,
    pub index_digest: String,
}

/// Reads and parses the document stream and index series. Parse errors
/// are prefixed with the file path so the message names file and line.
pub fn load_inputs(docs_path: &Path, index_path: &Path) -> Result<LoadedInputs> {
    let index_bytes =
        fs::read(index_path).map_err(|e| Error::io(index_path.display().to_string(), e))?;
    let index =
        IndexSeries::from_reader(&index_bytes[..]).map_err(|e| located(index_path, e))?;
    let docs_bytes =
        fs::read(docs_path).map_err(|e| Error::io(docs_path.display().to_string(), e))?;
    let docs = ingest_documents(&docs_bytes[..], &index).map_err(|e| located(docs_path, e))?;
    let corpus = partition_windows(preprocess(docs), &index)?;
    Ok(LoadedInputs {
        corpus,
        index,
        docs_digest: hex_digest(&docs_bytes),
        index_digest: hex_digest(&index_bytes),
    })
}

fn located(path: &Path, err: Error) -> Error {
    Error::invalid(format!("{}: {err}", path.display()))
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// Executes the pipeline end to end and writes the four report files
/// (`topics.csv`, `events.json`, `plot.csv`, `manifest.json`) into
/// `out_dir`. Returns the analysis so callers can add diagnostics.
pub fn run(
    config: &PipelineConfig,
    docs_path: &Path,
    index_path: &Path,
    out_dir: &Path,
) -> Result<Analysis> {
    let loaded = load_inputs(docs_path, index_path)?;
    let analysis = analyze(&loaded.corpus, &loaded.index, config)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    write_topics_csv(&analysis.topics, &out_dir.join("topics.csv"))?;
    write_events_json(&analysis, &loaded.corpus, &out_dir.join("events.json"))?;
    write_plot_csv(&analysis, &out_dir.join("plot.csv"))?;
    write_manifest(
        config,
        &loaded,
        docs_path,
        index_path,
        &out_dir.join("manifest.json"),
    )?;
    Ok(analysis)
}

/// A method row of the comparison report.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: &'static str,
    pub mean_score: f64,
    pub event_count: usize,
    pub scores: Vec<f64>,
}

fn summarize(method: &'static str, events: &[PrimingEvent]) -> MethodSummary {
    let scores: Vec<f64> = events.iter().map(|e| e.score).collect();
    let mean_score = if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    };
    MethodSummary {
        method,
        mean_score,
        event_count: scores.len(),
        scores,
    }
}

/// Runs the index-weighted and baseline pipelines on identical inputs and
/// writes `compare.csv` (method, mean score, event count) plus
/// `scores.csv` (every event score per method). The config's own
/// `baseline` flag is ignored: both methods always run.
pub fn compare(
    config: &PipelineConfig,
    docs_path: &Path,
    index_path: &Path,
    out_dir: &Path,
) -> Result<(MethodSummary, MethodSummary)> {
    let loaded = load_inputs(docs_path, index_path)?;
    let main_config = PipelineConfig {
        baseline: false,
        ..config.clone()
    };
    let baseline_config = PipelineConfig {
        baseline: true,
        ..config.clone()
    };
    let main = analyze(&loaded.corpus, &loaded.index, &main_config)?;
    let baseline = analyze(&loaded.corpus, &loaded.index, &baseline_config)?;
    let summaries = (
        summarize("main", &main.events),
        summarize("baseline", &baseline.events),
    );
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let mut writer = report_writer(&out_dir.join("compare.csv"))?;
    writer.write_record(["method", "mean_score", "event_count"])?;
    for summary in [&summaries.0, &summaries.1] {
        writer.write_record([
            summary.method.to_string(),
            summary.mean_score.to_string(),
            summary.event_count.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io("compare.csv", e))?;
    let mut writer = report_writer(&out_dir.join("scores.csv"))?;
    writer.write_record(["method", "rank", "score"])?;
    for summary in [&summaries.0, &summaries.1] {
        for (i, score) in summary.scores.iter().enumerate() {
            writer.write_record([
                summary.method.to_string(),
                (i + 1).to_string(),
                score.to_string(),
            ])?;
        }
    }
    writer.flush().map_err(|e| Error::io("scores.csv", e))?;
    Ok(summaries)
}

fn report_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Writes the ranked topics report: one row per topic, rank 1 first,
/// member features joined with `;`.
pub fn write_topics_csv(topics: &[Topic], path: &Path) -> Result<()> {
    let mut writer = report_writer(path)?;
    writer.write_record([
        "rank",
        "features",
        "doc_component",
        "temporal_component",
        "influence_component",
        "probability",
    ])?;
    for (i, topic) in topics.iter().enumerate() {
        writer.write_record([
            (i + 1).to_string(),
            topic.features.join(";"),
            topic.doc_component.to_string(),
            topic.temporal_component.to_string(),
            topic.influence_component.to_string(),
            topic.probability.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// One ranked event as reported in `events.json`.
#[derive(Serialize)]
pub struct EventReport {
    pub rank: usize,
    pub score: f64,
    /// Start date of the first span window.
    pub begin_date: chrono::NaiveDate,
    /// Exclusive end boundary of the last span window.
    pub end_date: chrono::NaiveDate,
    /// Per span window: the clusters active there, each cluster a list
    /// of its member topics' feature lists. Empty for gap windows.
    pub clusters: Vec<Vec<Vec<Vec<String>>>>,
    /// Burst intensity per span window.
    pub intensity: Vec<f64>,
    /// Volatility weights over the span.
    pub pvi: Vec<f64>,
}

/// Builds the ranked event reports serialized into `events.json`.
pub fn event_reports(analysis: &Analysis, corpus: &WindowedCorpus) -> Vec<EventReport> {
    analysis
        .events
        .iter()
        .enumerate()
        .map(|(i, event)| {
            let clusters = event
                .clusters_by_window
                .iter()
                .enumerate()
                .map(|(offset, ids)| {
                    ids.iter()
                        .map(|&c| {
                            analysis.clusters[event.begin + offset][c]
                                .topic_ids
                                .iter()
                                .map(|&t| analysis.topics[t].features.clone())
                                .collect()
                        })
                        .collect()
                })
                .collect();
            EventReport {
                rank: i + 1,
                score: event.score,
                begin_date: corpus.windows[event.begin].start,
                end_date: corpus.windows[event.end].end,
                clusters,
                intensity: event.intensity.clone(),
                pvi: analysis.pvi.pvi[event.begin..=event.end].to_vec(),
            }
        })
        .collect()
}

/// Writes the ranked events report as a JSON array.
pub fn write_events_json(
    analysis: &Analysis,
    corpus: &WindowedCorpus,
    path: &Path,
) -> Result<()> {
    write_json(path, &event_reports(analysis, corpus))
}

/// Writes the plot-ready series: one row per window with the volatility
/// weight and, where an event covers the window, the best such event's
/// rank and intensity (empty fields otherwise).
pub fn write_plot_csv(analysis: &Analysis, path: &Path) -> Result<()> {
    let mut writer = report_writer(path)?;
    writer.write_record(["window", "pvi", "event_rank", "intensity"])?;
    for (w, &pvi) in analysis.pvi.pvi.iter().enumerate() {
        let hit = analysis
            .events
            .iter()
            .position(|e| e.begin <= w && w <= e.end);
        let (rank, intensity) = match hit {
            Some(i) => (
                (i + 1).to_string(),
                analysis.events[i].intensity[w - analysis.events[i].begin].to_string(),
            ),
            None => (String::new(), String::new()),
        };
        writer.write_record([w.to_string(), pvi.to_string(), rank, intensity])?;
    }
    writer.flush().map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

#[derive(Serialize)]
struct FileStamp {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct ManifestInputs {
    documents: FileStamp,
    index: FileStamp,
}

#[derive(Serialize)]
struct ManifestVersions {
    primevent: &'static str,
    report_schema: u32,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    config: &'a PipelineConfig,
    inputs: ManifestInputs,
    versions: ManifestVersions,
}

/// Writes the run manifest: the complete config, input digests, and
/// version stamps.
pub fn write_manifest(
    config: &PipelineConfig,
    loaded: &LoadedInputs,
    docs_path: &Path,
    index_path: &Path,
    path: &Path,
) -> Result<()> {
    let manifest = RunManifest {
        config,
        inputs: ManifestInputs {
            documents: FileStamp {
                path: docs_path.display().to_string(),
                sha256: loaded.docs_digest.clone(),
            },
            index: FileStamp {
                path: index_path.display().to_string(),
                sha256: loaded.index_digest.clone(),
            },
        },
        versions: ManifestVersions {
            primevent: env!("CARGO_PKG_VERSION"),
            report_schema: 1,
        },
    };
    write_json(path, &manifest)
}

#[derive(Serialize)]
struct WindowDiagnostic {
    window: usize,
    clusters: Vec<Vec<Vec<String>>>,
}

/// Writes the per-window clustering diagnostic: each window's clusters
/// with their member topics' feature lists.
pub fn write_clusters_json(analysis: &Analysis, path: &Path) -> Result<()> {
    let diagnostics: Vec<WindowDiagnostic> = analysis
        .clusters
        .iter()
        .enumerate()
        .map(|(w, clusters)| WindowDiagnostic {
            window: w,
            clusters: clusters
                .iter()
                .map(|c| {
                    c.topic_ids
                        .iter()
                        .map(|&t| analysis.topics[t].features.clone())
                        .collect()
                })
                .collect(),
        })
        .collect();
    write_json(path, &diagnostics)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut file =
        fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n")
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

/// Streams the burst-series diagnostic (`feature,window,probability`)
/// for the selected features, or every feature when none are named.
pub fn write_burst_dump(
    bursts: &BurstMatrix,
    features: Option<&[String]>,
    out: impl Write,
) -> Result<()> {
    let ids: Vec<usize> = match features {
        Some(names) => names
            .iter()
            .map(|name| {
                bursts
                    .features
                    .iter()
                    .position(|f| f == name)
                    .ok_or_else(|| Error::UnknownFeature(name.clone()))
            })
            .collect::<Result<_>>()?,
        None => (0..bursts.features.len()).collect(),
    };
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["feature", "window", "probability"])?;
    for f in ids {
        for (w, &p) in bursts.series[f].iter().enumerate() {
            writer.write_record([
                bursts.features[f].clone(),
                w.to_string(),
                p.to_string(),
            ])?;
        }
    }
    writer.flush().map_err(|e| Error::io("burst dump", e))?;
    Ok(())
}

/// Streams the volatility diagnostic (`window,index,vi,pvi`).
pub fn write_volatility_dump(
    index: &IndexSeries,
    vi: &VolatilitySeries,
    pvi: &ProbVolatility,
    out: impl Write,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["window", "index", "vi", "pvi"])?;
    for w in 0..index.values.len() {
        writer.write_record([
            w.to_string(),
            index.values[w].to_string(),
            vi.values[w].to_string(),
            pvi.pvi[w].to_string(),
        ])?;
    }
    writer.flush().map_err(|e| Error::io("volatility dump", e))?;
    Ok(())
}
