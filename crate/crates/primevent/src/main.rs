//! Command-line interface: `run` executes the full pipeline and writes
//! reports, `compare` scores the index-weighted method against the
//! burst-only baseline, `synth` generates labeled fixtures, and the
//! `dump-*` subcommands stream stage diagnostics.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use primevent::burst::burst_series;
use primevent::corpus::IndexSeries;
use primevent::pipeline::{
    self, stage_seed, PipelineConfig, Stage, write_burst_dump, write_clusters_json,
    write_volatility_dump,
};
use primevent::synth::{generate, SpanSpec, SynthConfig};
use primevent::volatility::{fit_logistic, log_returns, probabilize, volatility_series, PviMode};

#[derive(Parser)]
#[command(
    name = "primevent",
    version,
    about = "Detects priming events: bursty topic clusters that move together with a numeric index"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write topics.csv, events.json,
    /// plot.csv, and manifest.json.
    Run(RunArgs),
    /// Run the index-weighted and baseline methods on the same inputs
    /// and write compare.csv plus scores.csv.
    Compare(CompareArgs),
    /// Generate a synthetic corpus and index with planted events.
    Synth(SynthArgs),
    /// Stream per-feature burst probabilities as CSV.
    DumpBursts(DumpBurstsArgs),
    /// Stream the volatility chain (index, vi, pvi) as CSV.
    DumpVolatility(DumpVolatilityArgs),
}

/// Pipeline configuration: defaults, overridden by `--config FILE`,
/// overridden by the explicit flags.
#[derive(Args, Debug)]
struct ConfigArgs {
    /// Flat JSON config file; the flags below override its values.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Cumulative probability at or above which a window counts as bursty.
    #[arg(long, value_name = "PROB")]
    burst_threshold: Option<f64>,
    /// Trailing windows in the rolling volatility estimate.
    #[arg(long, value_name = "N")]
    volatility_horizon: Option<usize>,
    /// Quantization bins for the probabilized volatility index.
    #[arg(long, value_name = "N")]
    pvi_bins: Option<usize>,
    /// Volatility weighting: quantized or continuous.
    #[arg(long, value_name = "MODE")]
    pvi_mode: Option<PviMode>,
    /// Largest feature count a topic may grow to.
    #[arg(long, value_name = "N")]
    topic_size_cap: Option<usize>,
    /// Largest cluster count tried per window.
    #[arg(long, value_name = "N")]
    kmax: Option<usize>,
    /// Independent K-means starts per cluster count.
    #[arg(long, value_name = "N")]
    kmeans_restarts: Option<usize>,
    /// Similarity threshold linking clusters across adjacent windows.
    #[arg(long, value_name = "PROB")]
    sigma: Option<f64>,
    /// Overlap threshold for grouping cluster paths into one event.
    #[arg(long, value_name = "PROB")]
    tau: Option<f64>,
    /// Root RNG seed; each random stage derives its own stream from it.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Score topics and events without index weighting (true/false).
    #[arg(long, value_name = "BOOL")]
    baseline: Option<bool>,
}

impl ConfigArgs {
    fn resolve(&self) -> anyhow::Result<PipelineConfig> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.burst_threshold {
            config.burst_threshold = v;
        }
        if let Some(v) = self.volatility_horizon {
            config.volatility_horizon = v;
        }
        if let Some(v) = self.pvi_bins {
            config.pvi_bins = v;
        }
        if let Some(v) = self.pvi_mode {
            config.pvi_mode = v;
        }
        if let Some(v) = self.topic_size_cap {
            config.topic_size_cap = v;
        }
        if let Some(v) = self.kmax {
            config.kmax = v;
        }
        if let Some(v) = self.kmeans_restarts {
            config.kmeans_restarts = v;
        }
        if let Some(v) = self.sigma {
            config.sigma = v;
        }
        if let Some(v) = self.tau {
            config.tau = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.baseline {
            config.baseline = v;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct RunArgs {
    /// Document stream: one JSON record {"id","date","text"} per line.
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,
    /// Index series: CSV "date,value", one row per window start.
    #[arg(long, value_name = "FILE")]
    index: PathBuf,
    /// Report directory (created if absent).
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Also write clusters.json, the per-window clustering diagnostic.
    #[arg(long)]
    dump_clusters: bool,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Document stream: one JSON record {"id","date","text"} per line.
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,
    /// Index series: CSV "date,value", one row per window start.
    #[arg(long, value_name = "FILE")]
    index: PathBuf,
    /// Report directory (created if absent).
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

/// A planted or distractor span: `BEGIN:END` with optional explicit
/// feature indices `BEGIN:END:3,4,5`. Spans without explicit features
/// are assigned the next unclaimed indices.
#[derive(Clone, Debug)]
struct SpanArg {
    begin: usize,
    end: usize,
    features: Option<Vec<usize>>,
}

fn parse_span(text: &str) -> Result<SpanArg, String> {
    let mut parts = text.splitn(3, ':');
    let begin = parts
        .next()
        .unwrap_or_default()
        .parse::<usize>()
        .map_err(|_| format!("span '{text}': expected BEGIN:END[:f1,f2,...]"))?;
    let end = parts
        .next()
        .ok_or_else(|| format!("span '{text}': expected BEGIN:END[:f1,f2,...]"))?
        .parse::<usize>()
        .map_err(|_| format!("span '{text}': malformed END"))?;
    if end < begin {
        return Err(format!("span '{text}': END precedes BEGIN"));
    }
    let features = match parts.next() {
        Some(list) => Some(
            list.split(',')
                .map(|f| {
                    f.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("span '{text}': malformed feature index '{f}'"))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    Ok(SpanArg {
        begin,
        end,
        features,
    })
}

fn parse_spike(text: &str) -> Result<(usize, usize), String> {
    let span = parse_span(text)?;
    if span.features.is_some() {
        return Err(format!("spike '{text}': expected BEGIN:END"));
    }
    Ok((span.begin, span.end))
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for docs.jsonl, index.csv, and manifest.json.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Number of weekly index windows.
    #[arg(long, value_name = "N", default_value_t = 50)]
    windows: usize,
    /// Vocabulary size; plants and distractors draw from this pool.
    #[arg(long, value_name = "N", default_value_t = 200)]
    vocab: usize,
    /// Documents per window.
    #[arg(long, value_name = "N", default_value_t = 30)]
    docs_per_window: usize,
    /// Background tokens per document.
    #[arg(long, value_name = "N", default_value_t = 20)]
    tokens_per_doc: usize,
    /// Injected tokens per carrier document inside a planted span.
    #[arg(long, value_name = "N", default_value_t = 2)]
    plant_tokens_per_doc: usize,
    /// Probability that a background token is replaced by a random one.
    #[arg(long, value_name = "PROB", default_value_t = 0.005)]
    noise: f64,
    /// Log-return amplitude of index spikes.
    #[arg(long, value_name = "SCALE", default_value_t = 0.12)]
    spike_scale: f64,
    /// Window shift applied to every plant's volatility spike; 0 keeps
    /// burst and spike co-located.
    #[arg(long, value_name = "SHIFT", default_value_t = 0)]
    spike_offset: i64,
    /// Root RNG seed; the generator stream is derived from it.
    #[arg(long, value_name = "SEED", default_value_t = 0)]
    seed: u64,
    /// Planted event `BEGIN:END[:f1,f2,...]` (repeatable, at least one);
    /// omitted features are assigned the next unclaimed indices.
    #[arg(long = "plant", value_name = "SPAN", value_parser = parse_span)]
    plants: Vec<SpanArg>,
    /// Burst without an index spike, same syntax as --plant (repeatable).
    #[arg(long = "distractor", value_name = "SPAN", value_parser = parse_span)]
    distractors: Vec<SpanArg>,
    /// Index spike without a burst, `BEGIN:END` (repeatable).
    #[arg(long = "spike", value_name = "SPAN", value_parser = parse_spike)]
    spikes: Vec<(usize, usize)>,
    /// Features auto-assigned to each span given without explicit ones.
    #[arg(long, value_name = "N", default_value_t = 8)]
    span_features: usize,
}

#[derive(Args)]
struct DumpBurstsArgs {
    /// Document stream: one JSON record {"id","date","text"} per line.
    #[arg(long, value_name = "FILE")]
    docs: PathBuf,
    /// Index series: CSV "date,value", one row per window start.
    #[arg(long, value_name = "FILE")]
    index: PathBuf,
    /// Only these features (comma-separated); default is all features.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    features: Vec<String>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct DumpVolatilityArgs {
    /// Index series: CSV "date,value", one row per window start.
    #[arg(long, value_name = "FILE")]
    index: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run(args) => {
            let config = args.config.resolve()?;
            let analysis = pipeline::run(&config, &args.docs, &args.index, &args.out)?;
            if args.dump_clusters {
                write_clusters_json(&analysis, &args.out.join("clusters.json"))?;
            }
            Ok(())
        }
        Command::Compare(args) => {
            let config = args.config.resolve()?;
            pipeline::compare(&config, &args.docs, &args.index, &args.out)?;
            Ok(())
        }
        Command::Synth(args) => run_synth(args),
        Command::DumpBursts(args) => {
            let config = args.config.resolve()?;
            let loaded = pipeline::load_inputs(&args.docs, &args.index)?;
            let bursts = burst_series(&loaded.corpus, config.burst_threshold, false)?;
            let features = if args.features.is_empty() {
                None
            } else {
                Some(args.features.as_slice())
            };
            with_output(args.out.as_deref(), |out| {
                write_burst_dump(&bursts, features, out).map_err(Into::into)
            })
        }
        Command::DumpVolatility(args) => {
            let config = args.config.resolve()?;
            let bytes = fs::read(&args.index)
                .with_context(|| args.index.display().to_string())?;
            let index = IndexSeries::from_reader(&bytes[..])
                .with_context(|| args.index.display().to_string())?;
            let returns = log_returns(&index)?;
            let vi = volatility_series(&returns, config.volatility_horizon)?;
            let params = fit_logistic(&vi)?;
            let pvi = probabilize(&vi, params, config.pvi_bins, config.pvi_mode)?;
            with_output(args.out.as_deref(), |out| {
                write_volatility_dump(&index, &vi, &pvi, out).map_err(Into::into)
            })
        }
    }
}

fn with_output(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    match path {
        Some(path) => {
            let mut file = fs::File::create(path)
                .with_context(|| path.display().to_string())?;
            write(&mut file)
        }
        None => write(&mut std::io::stdout().lock()),
    }
}

/// Turns span arguments into generator specs, assigning each span given
/// without explicit features the next unclaimed indices.
fn assign_features(
    spans: &[SpanArg],
    per_span: usize,
    vocab: usize,
    claimed: &mut Vec<bool>,
) -> anyhow::Result<Vec<SpanSpec>> {
    let mut specs = Vec::with_capacity(spans.len());
    for span in spans {
        let features = match &span.features {
            Some(explicit) => {
                for &f in explicit {
                    if f >= vocab {
                        anyhow::bail!("feature index {f} exceeds vocabulary size {vocab}");
                    }
                    claimed[f] = true;
                }
                explicit.clone()
            }
            None => {
                let mut auto = Vec::with_capacity(per_span);
                let mut next = 0;
                while auto.len() < per_span {
                    if next >= vocab {
                        anyhow::bail!(
                            "vocabulary size {vocab} cannot supply {per_span} more unclaimed features"
                        );
                    }
                    if !claimed[next] {
                        claimed[next] = true;
                        auto.push(next);
                    }
                    next += 1;
                }
                auto
            }
        };
        specs.push(SpanSpec {
            begin: span.begin,
            end: span.end,
            features,
        });
    }
    Ok(specs)
}

fn run_synth(args: SynthArgs) -> anyhow::Result<()> {
    if args.plants.is_empty() {
        anyhow::bail!("at least one --plant span is required");
    }
    let mut claimed = vec![false; args.vocab];
    let plants = assign_features(&args.plants, args.span_features, args.vocab, &mut claimed)?;
    let distractors =
        assign_features(&args.distractors, args.span_features, args.vocab, &mut claimed)?;
    let config = SynthConfig {
        windows: args.windows,
        vocab: args.vocab,
        docs_per_window: args.docs_per_window,
        tokens_per_doc: args.tokens_per_doc,
        plant_tokens_per_doc: args.plant_tokens_per_doc,
        noise: args.noise,
        spike_scale: args.spike_scale,
        spike_offset: args.spike_offset,
        seed: stage_seed(args.seed, Stage::Synthesis),
        plants,
        distractors,
        spikes: args.spikes,
    };
    let fixture = generate(&config)?;
    for warning in &fixture.warnings {
        eprintln!("warning: {warning}");
    }
    fs::create_dir_all(&args.out).with_context(|| args.out.display().to_string())?;
    for (name, content) in [
        ("docs.jsonl", &fixture.documents_jsonl),
        ("index.csv", &fixture.index_csv),
        ("manifest.json", &fixture.manifest_json),
    ] {
        let path = args.out.join(name);
        fs::write(&path, content).with_context(|| path.display().to_string())?;
    }
    Ok(())
}
