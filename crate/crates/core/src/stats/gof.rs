//! Goodness-of-fit tests: one-sample Kolmogorov–Smirnov (with an optional
//! lattice continuity correction) and chi-square against given cell
//! probabilities.

use crate::error::CoreError;
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a hypothesis test.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub statistic: f64,
    pub p_value: f64,
    pub n: u64,
}

/// Two-sided KS statistic of sorted samples against a CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x).clamp(0.0, 1.0);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Survival function `Q(λ) = P(K > λ)` of the Kolmogorov distribution.
/// Uses the alternating series for large `λ` and the theta-dual series for
/// small `λ`, both truncated well below f64 precision.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // CDF = √(2π)/λ Σ_{k odd} exp(−k²π²/(8λ²))
        let f = std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let mut cdf = 0.0;
        for k in (1u32..=19).step_by(2) {
            cdf += (-f * (k * k) as f64).exp();
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / lambda;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut q = 0.0;
        let mut sign = 1.0;
        for k in 1u32..=100 {
            let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
            if term < 1e-18 {
                break;
            }
            q += sign * term;
            sign = -sign;
        }
        (2.0 * q).clamp(0.0, 1.0)
    }
}

/// One-sample two-sided KS test with the Stephens small-sample correction.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<TestReport, CoreError> {
    if samples.is_empty() {
        return Err(CoreError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN samples"));
    let d = ks_statistic(&sorted, cdf);
    let n = sorted.len() as f64;
    let lambda = d * (n.sqrt() + 0.12 + 0.11 / n.sqrt());
    Ok(TestReport { statistic: d, p_value: kolmogorov_survival(lambda), n: sorted.len() as u64 })
}

/// KS test for lattice-valued samples against a continuous CDF.
///
/// Samples living on a lattice of spacing `cell` keep an O(cell) distance
/// from any continuous law, so a plain KS test rejects for the wrong reason
/// once `n ≫ cell^{-2}`. Smearing each sample uniformly over its lattice cell
/// compares the piecewise-averaged CDF instead, which converges to the target
/// whenever the lattice law does (residual bias O(cell²)).
pub fn ks_test_jittered<R: Rng + ?Sized>(
    samples: &[f64],
    cell: f64,
    cdf: impl Fn(f64) -> f64,
    rng: &mut R,
) -> Result<TestReport, CoreError> {
    if !(cell > 0.0) {
        return Err(CoreError::DimensionMismatch(format!("cell width {cell} must be positive")));
    }
    let jittered: Vec<f64> =
        samples.iter().map(|&x| x + cell * (rng.gen::<f64>() - 0.5)).collect();
    ks_test(&jittered, cdf)
}

/// Chi-square test of observed counts against cell probabilities.
/// Probabilities must sum to 1 within 1e-9; cells with `p = 0` must be empty.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<TestReport, CoreError> {
    if observed.len() != probs.len() {
        return Err(CoreError::DimensionMismatch(format!(
            "{} cells vs {} probabilities",
            observed.len(),
            probs.len()
        )));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(CoreError::EmptySample);
    }
    let psum: f64 = probs.iter().sum();
    if (psum - 1.0).abs() > 1e-9 || probs.iter().any(|&p| p < 0.0) {
        return Err(CoreError::DimensionMismatch(format!("probabilities sum to {psum}")));
    }
    let mut stat = 0.0;
    let mut dof: i64 = -1;
    for (&o, &p) in observed.iter().zip(probs) {
        if p == 0.0 {
            if o != 0 {
                return Err(CoreError::DimensionMismatch(
                    "observed mass in a zero-probability cell".into(),
                ));
            }
            continue;
        }
        let e = total as f64 * p;
        stat += (o as f64 - e) * (o as f64 - e) / e;
        dof += 1;
    }
    if dof < 1 {
        return Err(CoreError::DimensionMismatch("need at least two non-trivial cells".into()));
    }
    let chi = ChiSquared::new(dof as f64).expect("dof ≥ 1");
    Ok(TestReport { statistic: stat, p_value: 1.0 - chi.cdf(stat), n: total })
}
