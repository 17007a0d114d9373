//! Per-feature burst detection against a constant-rate null model.
//!
//! Each feature f gets an expected occurrence rate p_e from the whole
//! corpus. For every window the observed count n(f,w) is compared with a
//! Binomial(N_w, p_e) null. [`burst_probability`] exposes the upper tail
//! P(X ≥ n) — the probability of seeing at least the witnessed count.
//! The per-window burst series stores how far the observed count sits
//! into the right tail of the null, i.e. P(X ≤ n(f,w)): a window whose
//! count is far above expectation scores near 1, and the bursty window
//! set B_f collects windows with series values at or above the burst
//! threshold (default 0.9).

use rayon::prelude::*;

use crate::corpus::WindowedCorpus;
use crate::error::{Error, Result};

const RATE_EPSILON: f64 = 1e-12;

/// Burst probability series and bursty-window sets for every feature.
#[derive(Debug, Clone)]
pub struct BurstMatrix {
    /// Feature names, aligned with the corpus vocabulary.
    pub features: Vec<String>,
    /// `series[f][w]` = P(X ≤ n(f,w)) under the feature's null model.
    pub series: Vec<Vec<f64>>,
    /// Expected per-token rate p_e of each feature, clamped to (0,1).
    pub expected_rate: Vec<f64>,
    /// `bursty_windows[f]` = ascending windows with series ≥ threshold.
    pub bursty_windows: Vec<Vec<usize>>,
    /// Threshold the bursty-window sets were built with.
    pub threshold: f64,
}

impl BurstMatrix {
    pub fn window_count(&self) -> usize {
        self.series.first().map_or(0, Vec::len)
    }
}

/// Expected rate of feature `f`: its corpus-wide occurrence share,
/// clamped to `[1e-12, 1 - 1e-12]`.
pub fn expected_rate(corpus: &WindowedCorpus, f: usize) -> Result<f64> {
    if f >= corpus.feature_count() {
        return Err(Error::UnknownFeature(format!("#{f}")));
    }
    let total = corpus.corpus_total();
    if total == 0 {
        return Err(Error::EmptyCorpus);
    }
    let rate = corpus.feature_total(f) as f64 / total as f64;
    Ok(rate.clamp(RATE_EPSILON, 1.0 - RATE_EPSILON))
}

/// Upper-tail probability P(X ≥ n) for X ~ Binomial(N, p), evaluated via
/// the regularized incomplete beta function: P(X ≥ n) = I_p(n, N−n+1).
pub fn burst_probability(n: u64, total: u64, p: f64) -> Result<f64> {
    if n > total {
        return Err(Error::CountExceedsTotal { count: n, total });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("rate {p} outside [0,1]")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok(statrs::function::beta::beta_reg(
        n as f64,
        (total - n) as f64 + 1.0,
        p,
    ))
}

/// How far the observed count sits into the right tail of the null:
/// P(X ≤ n) = 1 − P(X ≥ n+1). Empty windows carry no burst evidence and
/// score 0.
fn right_tail_mass(n: u64, total: u64, p: f64) -> Result<f64> {
    if total == 0 {
        return Ok(0.0);
    }
    if n >= total {
        return Ok(1.0);
    }
    Ok(1.0 - burst_probability(n + 1, total, p)?)
}

/// Computes the burst series and bursty-window sets for every feature.
///
/// With `exclude_bursty_rate` set, the expected rate is re-estimated
/// once with each feature's provisionally bursty windows excluded — a
/// sensitivity option; the default uses the whole corpus.
pub fn burst_series(
    corpus: &WindowedCorpus,
    threshold: f64,
    exclude_bursty_rate: bool,
) -> Result<BurstMatrix> {
    if !(0.0..1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "burst threshold {threshold} outside [0,1)"
        )));
    }
    if corpus.corpus_total() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let window_count = corpus.window_count();
    let rows: Vec<(f64, Vec<f64>, Vec<usize>)> = (0..corpus.feature_count())
        .into_par_iter()
        .map(|f| -> Result<(f64, Vec<f64>, Vec<usize>)> {
            let mut rate = expected_rate(corpus, f)?;
            let series_for = |rate: f64| -> Result<Vec<f64>> {
                (0..window_count)
                    .map(|w| right_tail_mass(corpus.count(f, w), corpus.total(w), rate))
                    .collect()
            };
            let bursty_for = |series: &[f64]| -> Vec<usize> {
                series
                    .iter()
                    .enumerate()
                    .filter(|&(_, &p)| p >= threshold)
                    .map(|(w, _)| w)
                    .collect()
            };
            let mut series = series_for(rate)?;
            if exclude_bursty_rate {
                let provisional = bursty_for(&series);
                let excluded: std::collections::HashSet<usize> =
                    provisional.iter().copied().collect();
                let mut occurrences = 0u64;
                let mut tokens = 0u64;
                for w in 0..window_count {
                    if !excluded.contains(&w) {
                        occurrences += corpus.count(f, w);
                        tokens += corpus.total(w);
                    }
                }
                if tokens > 0 {
                    rate = (occurrences as f64 / tokens as f64)
                        .clamp(RATE_EPSILON, 1.0 - RATE_EPSILON);
                    series = series_for(rate)?;
                }
            }
            let bursty = bursty_for(&series);
            Ok((rate, series, bursty))
        })
        .collect::<Result<_>>()?;

    let mut matrix = BurstMatrix {
        features: corpus.features.clone(),
        series: Vec::with_capacity(rows.len()),
        expected_rate: Vec::with_capacity(rows.len()),
        bursty_windows: Vec::with_capacity(rows.len()),
        threshold,
    };
    for (rate, series, bursty) in rows {
        matrix.expected_rate.push(rate);
        matrix.series.push(series);
        matrix.bursty_windows.push(bursty);
    }
    Ok(matrix)
}
