//! Covariance estimation with delete-one jackknife standard errors.

use crate::error::CoreError;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceEstimate {
    pub value: f64,
    pub se: f64,
    pub n: u64,
}

/// Unbiased covariance of paired samples with a delete-one jackknife SE.
///
/// With centred data the leave-one-out estimate has the closed form
/// `cov_(i) = (S − n/(n−1)·x'_i y'_i) / (n−2)`, so the whole jackknife runs
/// in O(n) without recomputing sums.
pub fn covariance_jackknife(x: &[f64], y: &[f64]) -> Result<CovarianceEstimate, CoreError> {
    if x.len() != y.len() {
        return Err(CoreError::DimensionMismatch(format!("{} vs {} samples", x.len(), y.len())));
    }
    let n = x.len();
    if n < 3 {
        return Err(CoreError::EmptySample);
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let s: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let value = s / (nf - 1.0);

    let scale = nf / (nf - 1.0);
    let mut loo = Vec::with_capacity(n);
    for i in 0..n {
        let p = (x[i] - mx) * (y[i] - my);
        loo.push((s - scale * p) / (nf - 2.0));
    }
    let lmean = loo.iter().sum::<f64>() / nf;
    let var_jack: f64 = loo.iter().map(|v| (v - lmean) * (v - lmean)).sum::<f64>() * (nf - 1.0) / nf;
    Ok(CovarianceEstimate { value, se: var_jack.sqrt(), n: n as u64 })
}
