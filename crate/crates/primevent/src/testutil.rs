//! Shared fixture builders for unit tests.

use crate::corpus::{partition_windows, Document, DocumentSet, IndexSeries, WindowedCorpus};
use crate::topics::Topic;
use chrono::NaiveDate;

pub(crate) fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

/// A corpus with `windows` consecutive weekly windows starting 2021-01-04
/// and the given documents, whose tokens are used verbatim (no
/// normalization or day filtering).
pub(crate) fn corpus_from_docs(
    windows: usize,
    docs: &[(&str, &str, &[&str])],
) -> WindowedCorpus {
    let rows: Vec<(NaiveDate, f64)> = (0..windows)
        .map(|i| {
            let start = date("2021-01-04") + chrono::Duration::days(7 * i as i64);
            (start, 100.0)
        })
        .collect();
    let index = IndexSeries::from_rows(&rows).unwrap();
    let docs = docs
        .iter()
        .map(|&(id, day, tokens)| Document {
            id: id.to_string(),
            date: date(day),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
        })
        .collect();
    let set = DocumentSet {
        docs,
        dropped_out_of_span: 0,
    };
    partition_windows(set, &index).unwrap()
}

/// A topic stub whose scoring fields are fixed and irrelevant.
pub(crate) fn stub_topic(features: &[&str]) -> Topic {
    scored_topic(features, 1.0, &[])
}

/// A topic stub with a chosen probability and burst series.
pub(crate) fn scored_topic(features: &[&str], probability: f64, series: &[f64]) -> Topic {
    let threshold = 0.9;
    Topic {
        features: features.iter().map(|f| f.to_string()).collect(),
        doc_component: 1.0,
        temporal_component: 1.0,
        influence_component: probability,
        probability,
        burst_series: series.to_vec(),
        bursty_windows: (0..series.len()).filter(|&w| series[w] >= threshold).collect(),
    }
}
