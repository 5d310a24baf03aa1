//! Time-series helpers: autocorrelation, batch means, exponential-decay fits.

use crate::error::CoreError;

/// Normalized autocorrelation `ρ(0..=max_lag)` of an evenly sampled series.
pub fn autocorrelation(xs: &[f64], max_lag: usize) -> Result<Vec<f64>, CoreError> {
    if xs.len() < max_lag + 2 {
        return Err(CoreError::EmptySample);
    }
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    if var == 0.0 {
        return Err(CoreError::EmptySample);
    }
    let mut acf = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let c: f64 = (0..n - lag).map(|i| (xs[i] - mean) * (xs[i + lag] - mean)).sum();
        acf.push(c / var);
    }
    Ok(acf)
}

/// Mean and batch-means standard error of a correlated series, using
/// `n_batches` contiguous batches (default choice in this workspace: 32).
pub fn batch_means(xs: &[f64], n_batches: usize) -> Result<(f64, f64), CoreError> {
    if n_batches < 2 || xs.len() < 2 * n_batches {
        return Err(CoreError::EmptySample);
    }
    let b = xs.len() / n_batches;
    let used = b * n_batches;
    let means: Vec<f64> =
        (0..n_batches).map(|k| xs[k * b..(k + 1) * b].iter().sum::<f64>() / b as f64).collect();
    let grand = xs[..used].iter().sum::<f64>() / used as f64;
    let var_b: f64 =
        means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (n_batches - 1) as f64;
    Ok((grand, (var_b / n_batches as f64).sqrt()))
}

/// Least-squares fit of `ρ(t) ≈ exp(−r·t)` through the origin on lags where
/// the autocorrelation is still informative (`ρ > floor`). Returns the rate.
pub fn fit_exp_rate(ts: &[f64], rho: &[f64], floor: f64) -> Result<f64, CoreError> {
    if ts.len() != rho.len() {
        return Err(CoreError::DimensionMismatch(format!("{} times, {} values", ts.len(), rho.len())));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut used = 0;
    for (&t, &r) in ts.iter().zip(rho) {
        if t > 0.0 && r > floor && r < 1.0 {
            num += t * r.ln();
            den += t * t;
            used += 1;
        }
    }
    if used < 2 || den == 0.0 {
        return Err(CoreError::EmptySample);
    }
    Ok(-num / den)
}
