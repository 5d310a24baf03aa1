//! Fourier-mode statistics of the additive-noise heat equation.
//!
//! Projecting `∂_t u = c·∂_x²u + σ·ξ` with Dirichlet boundary onto the sine
//! mode `√2·sin(nπx)` yields a one-dimensional Ornstein–Uhlenbeck process
//! with drift `c·n²π²` and noise variance `σ²`, hence stationary variance
//! `σ²/(2c·n²π²)` and autocorrelation `exp(−c·n²π²·t)`.

use crate::error::OracleError;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct OUMode {
    n: u32,
    c: f64,
    sigma: f64,
}

impl OUMode {
    pub fn new(n: u32, c: f64, sigma: f64) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::BadParameter(
                "mode index must be at least 1".into(),
            ));
        }
        if !(c > 0.0 && sigma > 0.0) {
            return Err(OracleError::BadParameter(format!(
                "need c > 0 and σ > 0, got c = {c}, σ = {sigma}"
            )));
        }
        Ok(OUMode { n, c, sigma })
    }

    pub fn mode(&self) -> u32 {
        self.n
    }

    /// Relaxation rate `c·n²π²`.
    pub fn drift(&self) -> f64 {
        self.c * (self.n as f64 * PI).powi(2)
    }

    /// Stationary variance `σ²/(2c·n²π²)`.
    pub fn stationary_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.drift())
    }

    /// Normalized stationary autocorrelation `exp(−drift·t)`.
    pub fn autocorrelation(&self, t: f64) -> Result<f64, OracleError> {
        if t < 0.0 {
            return Err(OracleError::BadParameter(format!(
                "autocorrelation lag must be nonnegative, got {t}"
            )));
        }
        Ok((-self.drift() * t).exp())
    }
}

/// `(stationary variance, autocorrelation at lag t)` for one sine mode.
pub fn ou_stats(mode: &OUMode, t: f64) -> Result<(f64, f64), OracleError> {
    Ok((mode.stationary_variance(), mode.autocorrelation(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::BridgeLaw;
    use fluctua_core::rng::stream;
    use fluctua_core::stats::Accumulator;

    #[test]
    fn reference_mode_values() {
        // n = 1, c = 1/2, σ = 1: drift = π²/2, variance = 1/π².
        let mode = OUMode::new(1, 0.5, 1.0).unwrap();
        assert!((mode.drift() - PI * PI / 2.0).abs() < 1e-12);
        assert!((mode.stationary_variance() - 1.0 / (PI * PI)).abs() < 1e-15);
        assert!((mode.autocorrelation(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn autocorrelation_is_a_semigroup() {
        let mode = OUMode::new(2, 0.7, 1.4).unwrap();
        for &(s, t) in &[(0.01, 0.02), (0.1, 0.25), (0.002, 0.3)] {
            let lhs = mode.autocorrelation(s + t).unwrap();
            let rhs = mode.autocorrelation(s).unwrap() * mode.autocorrelation(t).unwrap();
            assert!((lhs - rhs).abs() < 1e-13, "ρ({s}+{t}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn bridge_mode_variance_matches_ou_prediction() {
        // ⟨bridge, √2 sin(nπ·)⟩ has variance scale²/(n²π²); sampling the
        // bridge and projecting must agree with the OU stationary variance.
        let c = 0.5;
        let sigma = 1.0;
        let n_mode = 1u32;
        let mode = OUMode::new(n_mode, c, sigma).unwrap();
        let law = BridgeLaw::new(c, sigma, 256).unwrap();
        let l = 256usize;
        let weights: Vec<f64> = (0..=l)
            .map(|j| {
                let x = j as f64 / l as f64;
                let w = if j == 0 || j == l { 0.5 } else { 1.0 };
                w * (2.0f64).sqrt() * (n_mode as f64 * PI * x).sin() / l as f64
            })
            .collect();
        let samples = 20_000usize;
        let mut acc = Accumulator::new();
        let mut rng = stream(70, "ou-proj", 0);
        for _ in 0..samples {
            let u = law.sample(&mut rng);
            let proj: f64 = u
                .values()
                .iter()
                .zip(&weights)
                .map(|(v, w)| v * w)
                .sum();
            acc.push(proj * proj);
        }
        let want = mode.stationary_variance();
        // Var of a χ²₁-type average: Var(X²) = 2·Var(X)² for centered Gaussian.
        let se = (2.0 * want * want / samples as f64).sqrt();
        assert!(
            (acc.mean() - want).abs() < 3.0 * se + 1e-4,
            "projected variance {} vs {} ± {}",
            acc.mean(),
            want,
            se
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(OUMode::new(0, 0.5, 1.0).is_err());
        assert!(OUMode::new(1, -0.5, 1.0).is_err());
        assert!(OUMode::new(1, 0.5, 0.0).is_err());
        let mode = OUMode::new(1, 0.5, 1.0).unwrap();
        assert!(mode.autocorrelation(-1.0).is_err());
    }
}
