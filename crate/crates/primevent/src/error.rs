//! Error type shared by every stage of the detection pipeline.

use thiserror::Error;

/// Errors produced while loading inputs or running the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A document record could not be parsed as JSON.
    #[error("document record on line {line} is not valid JSON: {source}")]
    DocumentRecord {
        line: usize,
        #[source]
        source: serde_json::Error,
    },

    /// A document carried a date that is not `YYYY-MM-DD`.
    #[error("document '{id}' has malformed date '{date}' (expected YYYY-MM-DD)")]
    MalformedDate { id: String, date: String },

    /// The index CSV was malformed or too short to define windows.
    #[error("index series: {0}")]
    IndexSeries(String),

    /// The index contained a value for which a log return is undefined.
    #[error("index value at row {row} is {value}; log returns require positive values")]
    NonPositiveIndex { row: usize, value: f64 },

    /// No documents survived ingestion filtering.
    #[error("no documents fall inside the index date span")]
    EmptyCorpus,

    /// A feature string was requested that the corpus does not contain.
    #[error("unknown feature '{0}'")]
    UnknownFeature(String),

    /// An observed count exceeded the window total it was drawn from.
    #[error("observed count {count} exceeds window total {total}")]
    CountExceedsTotal { count: u64, total: u64 },

    /// A caller-supplied parameter was outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The volatility series cannot be fit because it is constant.
    #[error("volatility series is constant; the logistic fit is degenerate")]
    DegenerateFit,

    /// Two series that must be aligned had different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Filesystem failure while reading inputs or writing reports.
    #[error("io error on '{path}'")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// CSV-level failure in the index reader or a report writer.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON serialization failure in a report writer.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an io::Error with the path that produced it.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
