//! Seeded synthetic corpus/index generator for experiments and tests.
//!
//! The generator writes a document stream and an index series with known
//! ground truth: each *plant* is a vocabulary burst over a window span
//! with a volatility spike co-located on the index (the spike can be
//! shifted with `spike_offset` to build anti-correlated variants); each
//! *distractor* is a burst with no spike of its own, which a co-movement
//! detector should refuse to chain across; bare `spikes` perturb the
//! index with no matching burst. Background text rotates through the
//! vocabulary so that, at noise 0, no background feature is ever bursty.

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letters used to spell feature names: consonants only, so tokens pass
/// the digit filter, keep no vowels for the stemmer to act on, and avoid
/// a trailing `s` being stripped as a plural.
const NAME_ALPHABET: &[u8] = b"bcdfghjklmnpqrtv";

/// A planted burst: an inclusive window span and the vocabulary indices
/// that burst there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanSpec {
    pub begin: usize,
    pub end: usize,
    pub features: Vec<usize>,
}

/// Generator configuration. All randomness flows from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Number of index windows (weekly).
    pub windows: usize,
    /// Vocabulary size; plants and distractors draw from this pool.
    pub vocab: usize,
    pub docs_per_window: usize,
    /// Background tokens per document.
    pub tokens_per_doc: usize,
    /// Injected tokens per carrier document inside a planted span. Keep
    /// this small relative to the span's feature count: it sets per-day
    /// document frequency, and the stop-word filter deletes features that
    /// dominate a day.
    pub plant_tokens_per_doc: usize,
    /// Probability that a background token is replaced by a uniformly
    /// random one (0 keeps the rotation exact).
    pub noise: f64,
    /// Log-return amplitude of index spikes.
    pub spike_scale: f64,
    /// Window shift applied to every plant's volatility spike; 0 means
    /// co-located, nonzero builds the anti-correlated variants.
    pub spike_offset: i64,
    pub seed: u64,
    /// Bursts with co-located spikes: the ground-truth events.
    pub plants: Vec<SpanSpec>,
    /// Bursts without spikes (rising injection profile).
    pub distractors: Vec<SpanSpec>,
    /// Extra index spikes with no burst, as inclusive window spans.
    pub spikes: Vec<(usize, usize)>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            windows: 50,
            vocab: 200,
            docs_per_window: 30,
            tokens_per_doc: 20,
            plant_tokens_per_doc: 2,
            noise: 0.005,
            spike_scale: 0.12,
            spike_offset: 0,
            seed: 7,
            plants: Vec::new(),
            distractors: Vec::new(),
            spikes: Vec::new(),
        }
    }
}

/// A generated fixture, ready to write to disk.
#[derive(Debug, Clone)]
pub struct SynthFixture {
    pub documents_jsonl: String,
    pub index_csv: String,
    pub manifest_json: String,
    pub warnings: Vec<String>,
}

/// Spells vocabulary index `i` as a stemmer-stable token.
pub fn feature_name(i: usize) -> String {
    let base = NAME_ALPHABET.len();
    let mut digits = [0usize; 3];
    let mut rest = i;
    for slot in digits.iter_mut().rev() {
        *slot = rest % base;
        rest /= base;
    }
    let mut name = String::with_capacity(4);
    name.push('q');
    for d in digits {
        name.push(NAME_ALPHABET[d] as char);
    }
    name
}

fn validate_span(spec: &SpanSpec, what: &str, windows: usize, vocab: usize) -> Result<()> {
    if spec.begin > spec.end || spec.end >= windows {
        return Err(Error::invalid(format!(
            "{what} span {}..={} outside the {windows}-window range",
            spec.begin, spec.end
        )));
    }
    if spec.features.is_empty() {
        return Err(Error::invalid(format!("{what} has no features")));
    }
    if let Some(&f) = spec.features.iter().find(|&&f| f >= vocab) {
        return Err(Error::invalid(format!(
            "{what} feature index {f} outside the {vocab}-word vocabulary"
        )));
    }
    Ok(())
}

fn validate(config: &SynthConfig) -> Result<()> {
    if config.windows < 2 {
        return Err(Error::invalid("need at least 2 windows"));
    }
    if config.vocab == 0 || config.docs_per_window == 0 || config.tokens_per_doc == 0 {
        return Err(Error::invalid(
            "vocab, docs_per_window, and tokens_per_doc must all be positive",
        ));
    }
    if config.plant_tokens_per_doc == 0 {
        return Err(Error::invalid("plant_tokens_per_doc must be positive"));
    }
    if !(0.0..=1.0).contains(&config.noise) {
        return Err(Error::invalid(format!(
            "noise {} outside [0, 1]",
            config.noise
        )));
    }
    if config.plants.is_empty() {
        return Err(Error::invalid("need at least one plant"));
    }
    for plant in &config.plants {
        validate_span(plant, "plant", config.windows, config.vocab)?;
    }
    for distractor in &config.distractors {
        validate_span(distractor, "distractor", config.windows, config.vocab)?;
    }
    for &(begin, end) in &config.spikes {
        if begin > end || end >= config.windows {
            return Err(Error::invalid(format!(
                "spike span {begin}..={end} outside the {}-window range",
                config.windows
            )));
        }
    }
    Ok(())
}

/// Overlap warnings: two planted spans that intersect in windows and
/// share vocabulary make the ground truth ambiguous.
fn overlap_warnings(config: &SynthConfig) -> Vec<String> {
    let mut specs: Vec<(&str, usize, &SpanSpec)> = Vec::new();
    for (i, p) in config.plants.iter().enumerate() {
        specs.push(("plant", i, p));
    }
    for (i, d) in config.distractors.iter().enumerate() {
        specs.push(("distractor", i, d));
    }
    let mut warnings = Vec::new();
    for a in 0..specs.len() {
        for b in a + 1..specs.len() {
            let (kind_a, idx_a, spec_a) = specs[a];
            let (kind_b, idx_b, spec_b) = specs[b];
            let windows_overlap = spec_a.begin <= spec_b.end && spec_b.begin <= spec_a.end;
            let shared: Vec<usize> = spec_a
                .features
                .iter()
                .filter(|f| spec_b.features.contains(f))
                .copied()
                .collect();
            if windows_overlap && !shared.is_empty() {
                warnings.push(format!(
                    "{kind_a} {idx_a} and {kind_b} {idx_b} overlap in windows and share {} feature(s); ground truth is ambiguous",
                    shared.len()
                ));
            }
        }
    }
    warnings
}

/// Injection intensity at position `i` of an `len`-window span: a linear
/// ramp from 0.7 to 1.0, so a span's burst probability genuinely rises
/// across it instead of saturating flat (a flat series has no
/// correlation for the score to reward or punish).
fn profile(i: usize, len: usize) -> f64 {
    if len <= 1 {
        return 1.0;
    }
    0.7 + 0.3 * i as f64 / (len - 1) as f64
}

fn window_date(w: usize) -> NaiveDate {
    let base = NaiveDate::from_ymd_opt(2020, 1, 6).expect("valid base date");
    base + chrono::Duration::days(7 * w as i64)
}

/// Inclusive spiked window ranges: every plant span shifted by
/// `spike_offset` (clamped to the window range), plus the bare spikes.
fn spiked_ranges(config: &SynthConfig) -> Vec<(usize, usize)> {
    let last = config.windows as i64 - 1;
    let mut ranges = Vec::new();
    for plant in &config.plants {
        let begin = (plant.begin as i64 + config.spike_offset).clamp(0, last);
        let end = (plant.end as i64 + config.spike_offset).clamp(0, last);
        ranges.push((begin as usize, end as usize));
    }
    ranges.extend(config.spikes.iter().copied());
    ranges
}

fn build_index(config: &SynthConfig) -> String {
    let ranges = spiked_ranges(config);
    let mut csv = String::from("date,value\n");
    let mut value = 100.0_f64;
    for w in 0..config.windows {
        if w > 0 {
            // Return amplitude ramps across a spiked range so the rolling
            // volatility rises through it rather than jumping to one flat
            // level the probabilizer would collapse into a single bin.
            let amplitude = ranges
                .iter()
                .filter(|&&(b, e)| b <= w && w <= e)
                .map(|&(b, e)| {
                    if e == b {
                        1.0
                    } else {
                        0.4 + 0.6 * (w - b) as f64 / (e - b) as f64
                    }
                })
                .fold(0.0_f64, f64::max);
            if amplitude > 0.0 {
                // Alternate by global parity so overlapping spikes stay
                // consistent and the net drift cancels.
                let direction = if w % 2 == 0 { 1.0 } else { -1.0 };
                value *= (direction * amplitude * config.spike_scale).exp();
            }
        }
        csv.push_str(&format!("{},{:.6}\n", window_date(w), value));
    }
    csv
}

fn build_documents(config: &SynthConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut jsonl = String::new();
    let mut rotation = 0usize;
    for w in 0..config.windows {
        // Deal the window's background tokens from an even rotation over the
        // vocabulary, then shuffle the pool before splitting it into
        // documents. The rotation keeps every feature's per-window count
        // flat (no spurious bursts); the shuffle keeps document
        // co-occurrence unstructured (a fixed deal makes features with
        // nearby indices share documents systematically, which distorts
        // every document-overlap measurement downstream).
        let mut pool: Vec<usize> =
            Vec::with_capacity(config.docs_per_window * config.tokens_per_doc);
        for _ in 0..config.docs_per_window * config.tokens_per_doc {
            let mut feature = rotation % config.vocab;
            rotation += 1;
            if rng.gen_bool(config.noise) {
                feature = rng.gen_range(0..config.vocab);
            }
            pool.push(feature);
        }
        pool.shuffle(&mut rng);
        // The ramp scales how many of the window's documents carry each
        // injection (fine-grained counts) rather than tokens per document,
        // which would raise per-day document frequency until the stop-word
        // filter started eating the planted features. A span's injected
        // tokens are dealt from a balanced, shuffled pool of their own:
        // cycling keeps every member feature's per-window count exact (an
        // uneven draw would dent a window's burst probability), shuffling
        // keeps carrier assignment unstructured (a fixed deal welds
        // specific features together in the document space and splits the
        // span into disjoint sub-topics).
        let deal = |rng: &mut ChaCha8Rng, spec: &SpanSpec| -> Option<(usize, Vec<usize>)> {
            if !(spec.begin <= w && w <= spec.end) {
                return None;
            }
            let factor = profile(w - spec.begin, spec.end - spec.begin + 1);
            let carriers = ((config.docs_per_window as f64 * factor).round() as usize)
                .max(1)
                .min(config.docs_per_window);
            let mut injected: Vec<usize> = (0..carriers * config.plant_tokens_per_doc)
                .map(|k| spec.features[k % spec.features.len()])
                .collect();
            injected.shuffle(rng);
            Some((carriers, injected))
        };
        let plant_deals: Vec<Option<(usize, Vec<usize>)>> =
            config.plants.iter().map(|p| deal(&mut rng, p)).collect();
        let distractor_deals: Vec<Option<(usize, Vec<usize>)>> =
            config.distractors.iter().map(|s| deal(&mut rng, s)).collect();
        for d in 0..config.docs_per_window {
            // Spread documents evenly over the window's week so per-day
            // document-frequency filters see uniformly sized, well-mixed
            // days: tiny days make the stop-word threshold easy to trip,
            // and a day holding the entire window concentrates everything.
            // The shuffled pools above keep day composition unstructured.
            let date = window_date(w) + chrono::Duration::days((d % 7) as i64);
            let mut tokens: Vec<String> = pool
                [d * config.tokens_per_doc..(d + 1) * config.tokens_per_doc]
                .iter()
                .map(|&f| feature_name(f))
                .collect();
            for deals in [&plant_deals, &distractor_deals] {
                for (carriers, injected) in deals.iter().flatten() {
                    if d < *carriers {
                        let t = config.plant_tokens_per_doc;
                        tokens.extend(
                            injected[d * t..(d + 1) * t].iter().map(|&f| feature_name(f)),
                        );
                    }
                }
            }
            let record = serde_json::json!({
                "id": format!("d{w:03}x{d:03}"),
                "date": date.to_string(),
                "text": tokens.join(" "),
            });
            jsonl.push_str(&record.to_string());
            jsonl.push('\n');
        }
    }
    jsonl
}

fn build_manifest(config: &SynthConfig, warnings: &[String]) -> String {
    let span_entry = |spec: &SpanSpec| {
        serde_json::json!({
            "begin": spec.begin,
            "end": spec.end,
            "begin_date": window_date(spec.begin).to_string(),
            "end_date": window_date(spec.end).to_string(),
            "features": spec.features.iter().map(|&f| feature_name(f)).collect::<Vec<_>>(),
        })
    };
    let manifest = serde_json::json!({
        "generator_version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "plants": config.plants.iter().map(span_entry).collect::<Vec<_>>(),
        "distractors": config.distractors.iter().map(span_entry).collect::<Vec<_>>(),
        "spiked_windows": spiked_ranges(config),
        "warnings": warnings,
    });
    serde_json::to_string_pretty(&manifest).expect("manifest serializes")
}

/// Generates the fixture. Overlapping plants with shared vocabulary are
/// reported as warnings but still generated.
pub fn generate(config: &SynthConfig) -> Result<SynthFixture> {
    validate(config)?;
    let warnings = overlap_warnings(config);
    Ok(SynthFixture {
        documents_jsonl: build_documents(config),
        index_csv: build_index(config),
        manifest_json: build_manifest(config, &warnings),
        warnings,
    })
}
