//! Index volatility and its probabilized form.
//!
//! The raw index becomes continuously compounded returns, then a rolling
//! population standard deviation over a short horizon, and finally a
//! probabilistic series: a logistic distribution is fitted to the
//! volatility values by the method of moments and each value is mapped
//! through the fitted CDF into one of `A` equal-probability bins. The
//! binned value (the bin's upper boundary) is the PVI weight used by
//! every later stage.

use serde::{Deserialize, Serialize};

use crate::corpus::IndexSeries;
use crate::error::{Error, Result};

/// Log returns per window; entry 0 is fixed at 0.
pub type ReturnSeries = Vec<f64>;

/// Rolling volatility per window.
#[derive(Debug, Clone)]
pub struct VolatilitySeries {
    pub values: Vec<f64>,
    pub horizon: usize,
}

/// Probabilized volatility per window plus the fitted logistic params.
#[derive(Debug, Clone)]
pub struct ProbVolatility {
    pub pvi: Vec<f64>,
    pub logistic_mu: f64,
    pub logistic_s: f64,
    pub bins: usize,
}

/// How [`probabilize`] maps CDF values to PVI weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PviMode {
    /// Snap to the upper boundary of the containing equal-probability bin.
    Quantized,
    /// Use the raw CDF value.
    Continuous,
}

impl std::str::FromStr for PviMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quantized" => Ok(PviMode::Quantized),
            "continuous" => Ok(PviMode::Continuous),
            other => Err(Error::invalid(format!(
                "pvi mode '{other}' (expected quantized|continuous)"
            ))),
        }
    }
}

/// Continuously compounded returns: R_0 = 0, R_w = ln(I_w / I_{w-1}).
pub fn log_returns(index: &IndexSeries) -> Result<ReturnSeries> {
    for (row, &v) in index.values.iter().enumerate() {
        if !(v > 0.0) {
            return Err(Error::NonPositiveIndex { row, value: v });
        }
    }
    let mut returns = vec![0.0];
    for pair in index.values.windows(2) {
        returns.push((pair[1] / pair[0]).ln());
    }
    Ok(returns)
}

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt()
}

/// Rolling population standard deviation of the trailing `horizon`
/// returns. Early windows with fewer predecessors use all available
/// returns (at least two); window 0 copies window 1.
pub fn volatility_series(returns: &ReturnSeries, horizon: usize) -> Result<VolatilitySeries> {
    if horizon < 2 {
        return Err(Error::invalid(format!("volatility horizon {horizon} < 2")));
    }
    if returns.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 windows for volatility, got {}",
            returns.len()
        )));
    }
    let mut values = vec![0.0; returns.len()];
    for w in 1..returns.len() {
        let from = (w + 1).saturating_sub(horizon);
        values[w] = population_std(&returns[from..=w]);
    }
    values[0] = values[1];
    Ok(VolatilitySeries { values, horizon })
}

/// Method-of-moments logistic fit: mu is the mean and s = sqrt(3·var)/π
/// (population variance). Errors when the series is constant.
pub fn fit_logistic(vi: &VolatilitySeries) -> Result<(f64, f64)> {
    let n = vi.values.len() as f64;
    let mu = vi.values.iter().sum::<f64>() / n;
    let var = vi.values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / n;
    let s = (3.0 * var).sqrt() / std::f64::consts::PI;
    if !(s > 0.0) {
        return Err(Error::DegenerateFit);
    }
    Ok((mu, s))
}

/// Maps each volatility value through the fitted logistic CDF into `A`
/// equal-probability bins. Quantized mode returns the containing bin's
/// upper boundary ⌈u·A⌉/A (with u = 0 mapped to the first bin, 1/A);
/// continuous mode returns the CDF value itself, floored at a tiny
/// positive value so the series stays within (0, 1].
pub fn probabilize(
    vi: &VolatilitySeries,
    params: (f64, f64),
    bins: usize,
    mode: PviMode,
) -> Result<ProbVolatility> {
    if bins < 2 {
        return Err(Error::invalid(format!("pvi bins {bins} < 2")));
    }
    let (mu, s) = params;
    if !(s > 0.0) {
        return Err(Error::invalid(format!("logistic scale {s} must be > 0")));
    }
    let pvi = vi
        .values
        .iter()
        .map(|&v| {
            let u = 1.0 / (1.0 + (-(v - mu) / s).exp());
            match mode {
                PviMode::Quantized => {
                    let bin = (u * bins as f64).ceil().max(1.0);
                    bin / bins as f64
                }
                PviMode::Continuous => u.max(1e-300).min(1.0),
            }
        })
        .collect();
    Ok(ProbVolatility {
        pvi,
        logistic_mu: mu,
        logistic_s: s,
        bins,
    })
}
