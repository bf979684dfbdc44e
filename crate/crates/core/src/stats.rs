//! Error, autocorrelation, and comparison metrics used by the experiment
//! drivers.
//!
//! The error of a sampling method is the root mean square over many trials of
//! (trial mean - reference); the autocorrelation length tau of a Markov
//! stream is estimated both by direct summation of the normalized ACF and by
//! a log-linear fit of its exponential decay.

use serde::Serialize;
use thiserror::Error;

pub mod hypothesis;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("series too short: length {len} with cutoff {cutoff}")]
    SeriesTooShort { len: usize, cutoff: usize },
    #[error("zero variance: c(0) = 0, autocorrelation length undefined")]
    ZeroVariance,
    #[error("log fit needs at least 3 leading positive ACF values, found {found}")]
    InsufficientPositiveLags { found: usize },
    #[error("need at least 2 trials, got {0}")]
    TooFewTrials(usize),
    #[error("error ratio undefined: FFS error is zero")]
    DivisionByZeroError,
}

/// A measurement stream, one value per sample.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    pub values: Vec<f64>,
    pub label: String,
}

impl ObservableSeries {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Self { values, label: label.into() }
    }
}

/// Autocorrelation function values at lags 0..=cutoff.
#[derive(Debug, Clone)]
pub struct AcfCurve {
    values: Vec<f64>,
}

impl AcfCurve {
    /// Wrap precomputed ACF values (lag 0 first).
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(!values.is_empty());
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cutoff(&self) -> usize {
        self.values.len() - 1
    }
}

/// Default ACF cutoff: min(length/10, 500).
pub fn default_acf_cutoff(len: usize) -> usize {
    (len / 10).min(500)
}

/// Empirical autocorrelation function
/// `c(i) = 1/(N-i) * sum_n (f_n - mu)(f_{n+i} - mu)` with `mu` the full-series
/// mean, for lags 0..=cutoff.
pub fn acf(series: &[f64], cutoff: usize) -> Result<AcfCurve, StatsError> {
    let n = series.len();
    if n <= cutoff || n < 2 {
        return Err(StatsError::SeriesTooShort { len: n, cutoff });
    }
    let mu = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mu).collect();
    let mut values = Vec::with_capacity(cutoff + 1);
    for lag in 0..=cutoff {
        let m = n - lag;
        let s: f64 = (0..m).map(|i| centered[i] * centered[i + lag]).sum();
        values.push(s / m as f64);
    }
    Ok(AcfCurve { values })
}

/// Autocorrelation length by direct summation:
/// `tau = sum_{i=0}^{cutoff} c(i)/c(0)`.
pub fn acl_sum(curve: &AcfCurve) -> Result<f64, StatsError> {
    let c0 = curve.values[0];
    if c0 <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(curve.values.iter().map(|c| c / c0).sum())
}

/// Autocorrelation length by a least-squares fit of `ln c(i)` against lag
/// over the longest all-positive prefix (at least 3 points); for exponential
/// decay `c(i) = exp(-i/tau)` this recovers tau exactly (slope s, tau = -1/s).
pub fn acl_logfit(curve: &AcfCurve) -> Result<f64, StatsError> {
    let prefix: Vec<f64> = curve
        .values
        .iter()
        .take_while(|&&c| c > 0.0)
        .map(|&c| c.ln())
        .collect();
    if prefix.len() < 3 {
        return Err(StatsError::InsufficientPositiveLags { found: prefix.len() });
    }
    let n = prefix.len() as f64;
    let mean_x = (prefix.len() - 1) as f64 / 2.0;
    let mean_y = prefix.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, y) in prefix.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        // non-decaying ACF: no finite decay length from this estimator
        return Err(StatsError::InsufficientPositiveLags { found: prefix.len() });
    }
    Ok(-1.0 / slope)
}

/// Root mean square of (trial mean - reference) over trials.
pub fn trial_rms_error(trial_means: &[f64], reference: f64) -> Result<f64, StatsError> {
    if trial_means.len() < 2 {
        return Err(StatsError::TooFewTrials(trial_means.len()));
    }
    let s: f64 = trial_means.iter().map(|m| (m - reference) * (m - reference)).sum();
    Ok((s / trial_means.len() as f64).sqrt())
}

/// Error ratio eta = eps_Markov / eps_FFS.
pub fn error_ratio(markov_error: f64, ffs_error: f64) -> Result<f64, StatsError> {
    if ffs_error <= 0.0 {
        return Err(StatsError::DivisionByZeroError);
    }
    Ok(markov_error / ffs_error)
}

/// Per-trial summary against a reference value.
#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    #[serde(rename = "perTrialMeans", skip_serializing)]
    pub per_trial_means: Vec<f64>,
    pub reference: f64,
    #[serde(rename = "rmsError")]
    pub rms_error: f64,
}

impl TrialReport {
    pub fn new(per_trial_means: Vec<f64>, reference: f64) -> Result<Self, StatsError> {
        let rms_error = trial_rms_error(&per_trial_means, reference)?;
        Ok(Self { per_trial_means, reference, rms_error })
    }
}
