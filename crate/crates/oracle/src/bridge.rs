//! Scaled Brownian bridge: the invariant law of the additive-noise heat
//! equation with Dirichlet boundary.
//!
//! The stationary law of `∂_t u = c·∂_x²u + σ·ξ` on `[0,1]` is a Brownian
//! bridge multiplied by `√(σ²/(2c))`.  Samples are produced on a uniform
//! grid by the cumulative-increments-minus-linear construction, which is
//! exact in law at the grid nodes: `Cov(u(s), u(t)) = scale²·s(1−t)` for
//! grid points `s ≤ t`.

use crate::error::OracleError;
use fluctua_core::field::FluctuationField;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone, Copy)]
pub struct BridgeLaw {
    scale: f64,
    resolution: usize,
}

impl BridgeLaw {
    /// Law with `scale = √(σ²/(2c))` from the SPDE coefficients.
    pub fn new(c: f64, sigma: f64, resolution: usize) -> Result<Self, OracleError> {
        if !(c > 0.0 && sigma > 0.0) {
            return Err(OracleError::BadParameter(format!(
                "need c > 0 and σ > 0, got c = {c}, σ = {sigma}"
            )));
        }
        Self::with_scale((sigma * sigma / (2.0 * c)).sqrt(), resolution)
    }

    /// Standard Brownian bridge (scale 1).
    pub fn standard(resolution: usize) -> Result<Self, OracleError> {
        Self::with_scale(1.0, resolution)
    }

    pub fn with_scale(scale: f64, resolution: usize) -> Result<Self, OracleError> {
        if resolution < 2 {
            return Err(OracleError::GridTooCoarse(resolution));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(OracleError::BadParameter(format!("bad scale {scale}")));
        }
        Ok(BridgeLaw { scale, resolution })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// `Cov(u(s), u(t)) = scale²·min(s,t)·(1 − max(s,t))`.
    pub fn covariance(&self, s: f64, t: f64) -> f64 {
        self.scale * self.scale * s.min(t) * (1.0 - s.max(t))
    }

    /// Exact Gaussian sample at the grid nodes; endpoints are exactly zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FluctuationField {
        let l = self.resolution;
        let step = (1.0 / l as f64).sqrt();
        let mut walk = Vec::with_capacity(l + 1);
        let mut acc = 0.0;
        walk.push(0.0);
        for _ in 0..l {
            let z: f64 = rng.sample(StandardNormal);
            acc += z * step;
            walk.push(acc);
        }
        let total = acc;
        let values: Vec<f64> = walk
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                if j == l {
                    0.0
                } else {
                    self.scale * (w - (j as f64 / l as f64) * total)
                }
            })
            .collect();
        FluctuationField::new(values).expect("finite by construction")
    }
}

/// Free-function form of [`BridgeLaw::sample`].
pub fn sample_bridge<R: Rng + ?Sized>(law: &BridgeLaw, rng: &mut R) -> FluctuationField {
    law.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fluctua_core::rng::stream;
    use fluctua_core::stats::CovAccumulator;

    #[test]
    fn endpoints_are_exactly_zero() {
        let law = BridgeLaw::new(0.5, 1.0, 64).unwrap();
        let mut rng = stream(40, "bridge-endpoints", 0);
        for _ in 0..100 {
            let u = law.sample(&mut rng);
            assert_eq!(u.values()[0], 0.0);
            assert_eq!(u.values()[64], 0.0);
        }
    }

    #[test]
    fn scale_from_spde_coefficients() {
        // c = 1/2, σ = 1 → scale = 1 (standard bridge).
        let law = BridgeLaw::new(0.5, 1.0, 16).unwrap();
        assert!((law.scale() - 1.0).abs() < 1e-15);
        // Var at 1/2 is scale²/4.
        assert!((law.covariance(0.5, 0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empirical_covariance_matches_formula() {
        // 5-point probe of Cov(u(s),u(t)) = scale²·min(1−max) within 3 SE.
        let law = BridgeLaw::new(1.0, 1.3, 32).unwrap();
        let probes = [0.25, 0.375, 0.5, 0.625, 0.75];
        let n = 100_000usize;
        let mut acc = CovAccumulator::new(probes.len());
        let mut rng = stream(41, "bridge-cov", 0);
        let mut row = vec![0.0; probes.len()];
        for _ in 0..n {
            let u = law.sample(&mut rng);
            for (j, &s) in probes.iter().enumerate() {
                row[j] = u.eval(s);
            }
            acc.push(&row);
        }
        for i in 0..probes.len() {
            for j in i..probes.len() {
                let want = law.covariance(probes[i], probes[j]);
                let got = acc.cov(i, j);
                // SE of a Gaussian covariance estimate:
                // Var(xy) = Cov(x,y)² + Var(x)Var(y).
                let se = ((want * want
                    + law.covariance(probes[i], probes[i])
                        * law.covariance(probes[j], probes[j]))
                    / n as f64)
                    .sqrt();
                assert!(
                    (got - want).abs() < 3.0 * se,
                    "Cov(u({}), u({})) = {got}, want {want} ± {se}",
                    probes[i],
                    probes[j]
                );
            }
        }
    }

    #[test]
    fn quarter_point_product_example() {
        // Cov(u(1/4), u(3/4)) = scale²/16.
        let law = BridgeLaw::with_scale(2.0, 16).unwrap();
        assert!((law.covariance(0.25, 0.75) - 4.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(BridgeLaw::new(0.0, 1.0, 16).is_err());
        assert!(BridgeLaw::new(0.5, -1.0, 16).is_err());
        assert!(BridgeLaw::with_scale(1.0, 1).is_err());
    }
}
