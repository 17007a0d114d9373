//! Corpus ingestion, normalization and window partitioning.
//!
//! Documents arrive as JSONL records with an id, a calendar date and raw
//! text. The index series arrives as a `date,value` CSV whose rows mark
//! window start dates. Documents are normalized (lowercase, pattern
//! removal, stemming, day-level frequency filters) and then partitioned
//! into the half-open date windows defined by the index.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::stem::stem;

/// One raw JSONL document record as it appears on disk.
#[derive(Debug, Clone, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub date: String,
    pub text: String,
}

/// A document after date parsing; `tokens` holds whitespace-split words
/// until [`preprocess`] replaces them with normalized features.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    pub tokens: Vec<String>,
}

/// Documents retained by ingestion plus the count of records dropped for
/// falling outside the index date span.
#[derive(Debug, Clone)]
pub struct DocumentSet {
    pub docs: Vec<Document>,
    pub dropped_out_of_span: usize,
}

/// A half-open date interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Window {
    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date < self.end
    }
}

/// The numeric index series and the windows its row dates define.
///
/// Each CSV row marks a window start; a window ends where the next one
/// starts. The final window's length is the median of the preceding
/// lengths (lower median for an even count).
#[derive(Debug, Clone)]
pub struct IndexSeries {
    pub windows: Vec<Window>,
    pub values: Vec<f64>,
}

impl IndexSeries {
    /// Builds the series from `(start date, value)` rows.
    pub fn from_rows(rows: &[(NaiveDate, f64)]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::IndexSeries(format!(
                "need at least 2 rows to define windows, got {}",
                rows.len()
            )));
        }
        let mut lengths = Vec::with_capacity(rows.len() - 1);
        for pair in rows.windows(2) {
            let days = (pair[1].0 - pair[0].0).num_days();
            if days <= 0 {
                return Err(Error::IndexSeries(format!(
                    "row dates must be strictly increasing ({} then {})",
                    pair[0].0, pair[1].0
                )));
            }
            lengths.push(days);
        }
        let mut sorted = lengths.clone();
        sorted.sort_unstable();
        let median = sorted[(sorted.len() - 1) / 2];
        let mut windows = Vec::with_capacity(rows.len());
        for (i, &(start, _)) in rows.iter().enumerate() {
            let end = match rows.get(i + 1) {
                Some(&(next, _)) => next,
                None => start + chrono::Duration::days(median),
            };
            windows.push(Window { start, end });
        }
        Ok(IndexSeries {
            windows,
            values: rows.iter().map(|&(_, v)| v).collect(),
        })
    }

    /// Reads a `date,value` CSV with a header row.
    pub fn from_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut csv_reader = csv::Reader::from_reader(reader);
        let mut rows = Vec::new();
        for (i, record) in csv_reader.records().enumerate() {
            let record = record?;
            let date_field = record.get(0).unwrap_or("");
            let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d").map_err(|_| {
                Error::IndexSeries(format!(
                    "row {}: malformed date '{date_field}' (expected YYYY-MM-DD)",
                    i + 2
                ))
            })?;
            let value_field = record.get(1).unwrap_or("");
            let value: f64 = value_field.parse().map_err(|_| {
                Error::IndexSeries(format!("row {}: malformed value '{value_field}'", i + 2))
            })?;
            rows.push((date, value));
        }
        Self::from_rows(&rows)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    /// The covered date span `[first start, last end)`.
    pub fn span(&self) -> (NaiveDate, NaiveDate) {
        (
            self.windows.first().expect("validated non-empty").start,
            self.windows.last().expect("validated non-empty").end,
        )
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }
}

/// Parses JSONL document records, keeping documents dated inside the
/// index span and counting the rest. Tokens are the raw whitespace-split
/// words; call [`preprocess`] to normalize them.
pub fn ingest_documents(reader: impl BufRead, index: &IndexSeries) -> Result<DocumentSet> {
    let (span_start, span_end) = index.span();
    let mut docs = Vec::new();
    let mut dropped = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("<records line {}>", i + 1), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord =
            serde_json::from_str(&line).map_err(|source| Error::DocumentRecord {
                line: i + 1,
                source,
            })?;
        let date =
            NaiveDate::parse_from_str(&record.date, "%Y-%m-%d").map_err(|_| {
                Error::MalformedDate {
                    id: record.id.clone(),
                    date: record.date.clone(),
                }
            })?;
        if date < span_start || date >= span_end {
            dropped += 1;
            continue;
        }
        docs.push(Document {
            id: record.id,
            date,
            tokens: record.text.split_whitespace().map(str::to_string).collect(),
        });
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(DocumentSet {
        docs,
        dropped_out_of_span: dropped,
    })
}

/// True for tokens shaped like a web address.
fn url_shaped(token: &str) -> bool {
    token.starts_with("http://")
        || token.starts_with("https://")
        || token.starts_with("www.")
        || token.contains("://")
}

/// True for tokens shaped like an email address: a non-empty local part
/// and a domain containing an interior dot.
fn email_shaped(token: &str) -> bool {
    match token.split_once('@') {
        Some((local, domain)) => {
            !local.is_empty()
                && domain.contains('.')
                && !domain.starts_with('.')
                && !domain.ends_with('.')
        }
        None => false,
    }
}

/// Normalizes one raw token into zero or more stemmed features.
fn normalize_token(raw: &str, out: &mut Vec<String>) {
    let lower = raw.to_lowercase();
    if url_shaped(&lower) || email_shaped(&lower) {
        return;
    }
    for piece in lower.split(|c: char| !c.is_ascii_alphanumeric()) {
        if piece.is_empty() || piece.bytes().any(|b| b.is_ascii_digit()) {
            continue;
        }
        out.push(stem(piece));
    }
}

/// Normalizes every document: lowercasing, digit/URL/email removal and
/// stemming, followed by the day-level frequency filters. Features seen
/// in more than 80% of a day's documents are dropped as stop words;
/// features seen in fewer than 5% are dropped as noise, except on days
/// with fewer than 5 documents. Documents left empty are retained.
pub fn preprocess(set: DocumentSet) -> DocumentSet {
    let DocumentSet {
        mut docs,
        dropped_out_of_span,
    } = set;
    for doc in &mut docs {
        let mut normalized = Vec::with_capacity(doc.tokens.len());
        for raw in &doc.tokens {
            normalize_token(raw, &mut normalized);
        }
        doc.tokens = normalized;
    }
    apply_day_filters(&mut docs);
    DocumentSet {
        docs,
        dropped_out_of_span,
    }
}

/// Applies the per-calendar-day stop-word and noise filters in place.
/// Thresholds are evaluated in integer arithmetic: a feature present in
/// `c` of `n` documents is a stop word when `5c > 4n` and noise when
/// `20c < n` (the latter only for days with `n >= 5`).
pub fn apply_day_filters(docs: &mut [Document]) {
    let mut by_day: BTreeMap<NaiveDate, Vec<usize>> = BTreeMap::new();
    for (i, doc) in docs.iter().enumerate() {
        by_day.entry(doc.date).or_default().push(i);
    }
    for day_docs in by_day.values() {
        let n = day_docs.len();
        let mut doc_frequency: HashMap<&str, usize> = HashMap::new();
        for &i in day_docs {
            let distinct: HashSet<&str> = docs[i].tokens.iter().map(String::as_str).collect();
            for token in distinct {
                *doc_frequency.entry(token).or_default() += 1;
            }
        }
        let removed: HashSet<String> = doc_frequency
            .iter()
            .filter(|&(_, &c)| 5 * c > 4 * n || (n >= 5 && 20 * c < n))
            .map(|(&t, _)| t.to_string())
            .collect();
        if removed.is_empty() {
            continue;
        }
        for &i in day_docs {
            docs[i].tokens.retain(|t| !removed.contains(t));
        }
    }
}

/// The corpus after window assignment, with the per-window feature
/// statistics every later stage reads.
#[derive(Debug, Clone)]
pub struct WindowedCorpus {
    pub windows: Vec<Window>,
    /// Documents sorted by (date, id).
    pub docs: Vec<Document>,
    /// Window index of each document.
    pub doc_window: Vec<usize>,
    /// Document indices per window, ascending.
    pub docs_by_window: Vec<Vec<usize>>,
    /// Sorted feature vocabulary; positions are feature ids.
    pub features: Vec<String>,
    feature_index: BTreeMap<String, usize>,
    /// `counts[f][w]` = occurrences of feature `f` in window `w`.
    counts: Vec<Vec<u64>>,
    /// `totals[w]` = total token occurrences in window `w`.
    totals: Vec<u64>,
    /// `doc_sets[f]` = ascending indices of documents containing `f`.
    pub doc_sets: Vec<Vec<usize>>,
    /// Per document: sorted `(feature id, occurrence count)` pairs.
    doc_feature_counts: Vec<Vec<(usize, u64)>>,
}

impl WindowedCorpus {
    pub fn window_count(&self) -> usize {
        self.windows.len()
    }

    pub fn feature_count(&self) -> usize {
        self.features.len()
    }

    pub fn feature_id(&self, name: &str) -> Option<usize> {
        self.feature_index.get(name).copied()
    }

    /// Occurrences of feature `f` in window `w` (`n(f,w)`).
    pub fn count(&self, f: usize, w: usize) -> u64 {
        self.counts[f][w]
    }

    /// Total token occurrences in window `w` (`N_w`).
    pub fn total(&self, w: usize) -> u64 {
        self.totals[w]
    }

    /// Occurrences of feature `f` summed over all windows.
    pub fn feature_total(&self, f: usize) -> u64 {
        self.counts[f].iter().sum()
    }

    /// Token occurrences summed over all windows.
    pub fn corpus_total(&self) -> u64 {
        self.totals.iter().sum()
    }

    /// Term-frequency vector of feature `f` over the documents of window
    /// `w`, in `docs_by_window[w]` order.
    pub fn tf_vector(&self, f: usize, w: usize) -> Vec<f64> {
        self.docs_by_window[w]
            .iter()
            .map(|&d| {
                self.doc_feature_counts[d]
                    .binary_search_by_key(&f, |&(id, _)| id)
                    .map(|pos| self.doc_feature_counts[d][pos].1 as f64)
                    .unwrap_or(0.0)
            })
            .collect()
    }
}

/// Assigns documents to index windows and precomputes feature statistics.
/// Documents are sorted by (date, id); features are sorted
/// lexicographically, which fixes every downstream ordering.
pub fn partition_windows(set: DocumentSet, index: &IndexSeries) -> Result<WindowedCorpus> {
    let mut docs = set.docs;
    docs.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.id.cmp(&b.id)));

    let windows = index.windows.clone();
    let starts: Vec<NaiveDate> = windows.iter().map(|w| w.start).collect();
    let mut doc_window = Vec::with_capacity(docs.len());
    let mut docs_by_window = vec![Vec::new(); windows.len()];
    for (i, doc) in docs.iter().enumerate() {
        let pos = starts.partition_point(|&s| s <= doc.date);
        if pos == 0 || doc.date >= windows[pos - 1].end {
            return Err(Error::invalid(format!(
                "document '{}' dated {} falls outside the index windows",
                doc.id, doc.date
            )));
        }
        doc_window.push(pos - 1);
        docs_by_window[pos - 1].push(i);
    }

    let vocabulary: BTreeSet<&str> = docs
        .iter()
        .flat_map(|d| d.tokens.iter().map(String::as_str))
        .collect();
    let features: Vec<String> = vocabulary.into_iter().map(str::to_string).collect();
    let feature_index: BTreeMap<String, usize> = features
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();

    let mut counts = vec![vec![0u64; windows.len()]; features.len()];
    let mut totals = vec![0u64; windows.len()];
    let mut doc_sets = vec![Vec::new(); features.len()];
    let mut doc_feature_counts = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        let w = doc_window[i];
        let mut per_doc: BTreeMap<usize, u64> = BTreeMap::new();
        for token in &doc.tokens {
            let f = feature_index[token.as_str()];
            *per_doc.entry(f).or_default() += 1;
        }
        totals[w] += doc.tokens.len() as u64;
        for (&f, &c) in &per_doc {
            counts[f][w] += c;
            doc_sets[f].push(i);
        }
        doc_feature_counts.push(per_doc.into_iter().collect());
    }

    Ok(WindowedCorpus {
        windows,
        docs,
        doc_window,
        docs_by_window,
        features,
        feature_index,
        counts,
        totals,
        doc_sets,
        doc_feature_counts,
    })
}
