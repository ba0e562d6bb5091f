use serde::Serialize;
use thiserror::Error;

use super::moments::{analytic_mean, analytic_variance};
use crate::flexscript::DistributionExpr;

pub const MIN_FIT_SAMPLES: usize = 100;
pub const DEFAULT_FIT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least {MIN_FIT_SAMPLES} samples, got {0}")]
    InsufficientSamples(usize),
    #[error("sample {index} is negative or not finite ({value})")]
    InvalidSample { index: usize, value: f64 },
}

/// Outcome of comparing empirical moments with the closed-form ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub n: usize,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub analytic_mean: f64,
    pub analytic_variance: f64,
    pub mean_rel_error: f64,
    pub variance_rel_error: f64,
    /// (empirical − analytic mean) / standard error of the mean.
    pub mean_z: f64,
    pub pass: bool,
}

/// Relative error with a scale fallback when the target is zero.
fn rel_error(observed: f64, expected: f64, scale: f64) -> f64 {
    let denom = if expected != 0.0 { expected.abs() } else { scale };
    if denom == 0.0 {
        if observed == expected {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (observed - expected).abs() / denom
    }
}

/// Checks that `samples` are consistent with `expr` by mean and variance.
pub fn fit_validate(
    samples: &[f64],
    expr: &DistributionExpr,
    rel_tol: f64,
) -> Result<FitReport, FitError> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(FitError::InsufficientSamples(samples.len()));
    }
    if let Some((index, &value)) = samples
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(FitError::InvalidSample { index, value });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let a_mean: f64 = analytic_mean(expr);
    let a_var: f64 = analytic_variance(expr);

    let mean_rel_error = rel_error(mean, a_mean, 1.0);
    // A zero-variance target is judged against the squared mean.
    let variance_rel_error = rel_error(var, a_var, a_mean * a_mean);
    let se = (a_var / n).sqrt();
    let mean_z = if se > 0.0 {
        (mean - a_mean) / se
    } else if mean == a_mean {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(FitReport {
        n: samples.len(),
        empirical_mean: mean,
        empirical_variance: var,
        analytic_mean: a_mean,
        analytic_variance: a_var,
        mean_rel_error,
        variance_rel_error,
        mean_z,
        pass: mean_rel_error <= rel_tol && variance_rel_error <= rel_tol,
    })
}
