//! Interface configurations: heights `h₀..h_N` pinned to zero at both ends,
//! optionally constrained to stay nonnegative (hard wall).

use crate::error::GradPhiError;
use fluctua_core::field::FluctuationField;
use rand::Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct GradPhiState {
    heights: Vec<f64>,
    hard_wall: bool,
    time: f64,
}

impl GradPhiState {
    /// Wrap a height profile `h₀..h_N`.  Both ends must be exactly zero and
    /// every height nonnegative when the hard wall is on.
    pub fn new(heights: Vec<f64>, hard_wall: bool) -> Result<Self, GradPhiError> {
        if heights.len() < 3 {
            return Err(GradPhiError::InvalidState(format!(
                "need at least two cells, got {} heights",
                heights.len()
            )));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(GradPhiError::InvalidState("non-finite height".into()));
        }
        if heights[0] != 0.0 || *heights.last().unwrap() != 0.0 {
            return Err(GradPhiError::InvalidState(format!(
                "ends must be pinned to zero, got {} and {}",
                heights[0],
                heights.last().unwrap()
            )));
        }
        if hard_wall && heights.iter().any(|&h| h < 0.0) {
            return Err(GradPhiError::InvalidState(
                "hard wall requires nonnegative heights".into(),
            ));
        }
        Ok(GradPhiState {
            heights,
            hard_wall,
            time: 0.0,
        })
    }

    /// Flat interface on `n_sites` cells.
    pub fn flat(n_sites: usize, hard_wall: bool) -> Result<Self, GradPhiError> {
        Self::new(vec![0.0; n_sites + 1], hard_wall)
    }

    /// Number of cells `N` (the profile has `N + 1` heights).
    pub fn n_sites(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn is_hard_wall(&self) -> bool {
        self.hard_wall
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub(crate) fn advance_clock(&mut self, dt: f64) {
        self.time += dt;
    }

    pub(crate) fn set_height(&mut self, i: usize, h: f64) {
        self.heights[i] = h;
    }

    /// True when every height is a whole number (required by integer
    /// potentials).
    pub fn is_integral(&self) -> bool {
        self.heights.iter().all(|h| h.fract() == 0.0)
    }

    /// Diffusively rescaled profile: the value at `x = k/N` is `h_k/√N`.
    pub fn fluctuation_field(&self) -> FluctuationField {
        let scale = 1.0 / (self.n_sites() as f64).sqrt();
        let values: Vec<f64> = self.heights.iter().map(|h| h * scale).collect();
        FluctuationField::new(values).expect("finite by construction")
    }

    /// Consistency audit: pinned ends and, under the wall, nonnegativity.
    pub fn validate(&self) -> Result<(), GradPhiError> {
        if self.heights[0] != 0.0 || *self.heights.last().unwrap() != 0.0 {
            return Err(GradPhiError::InvalidState("ends came unpinned".into()));
        }
        if self.hard_wall && self.heights.iter().any(|&h| h < 0.0) {
            return Err(GradPhiError::InvalidState(
                "hard wall violated".into(),
            ));
        }
        Ok(())
    }
}

/// Exact equilibrium draw for the quadratic potential without wall: the
/// increments are i.i.d. standard Gaussians conditioned to sum to zero,
/// realized as a random walk minus its linear interpolation.
pub fn gaussian_equilibrium<R: Rng + ?Sized>(
    n_sites: usize,
    rng: &mut R,
) -> Result<GradPhiState, GradPhiError> {
    if n_sites < 2 {
        return Err(GradPhiError::InvalidState(format!(
            "need at least two cells, got {n_sites}"
        )));
    }
    let mut walk = Vec::with_capacity(n_sites + 1);
    let mut acc = 0.0;
    walk.push(0.0);
    for _ in 0..n_sites {
        let z: f64 = rng.sample(StandardNormal);
        acc += z;
        walk.push(acc);
    }
    let total = acc;
    let heights: Vec<f64> = walk
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            if k == n_sites {
                0.0
            } else {
                w - (k as f64 / n_sites as f64) * total
            }
        })
        .collect();
    GradPhiState::new(heights, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fluctua_core::rng::stream;
    use fluctua_core::stats::Accumulator;

    #[test]
    fn state_invariants_are_enforced() {
        assert!(GradPhiState::new(vec![0.0, 1.0, 0.0], false).is_ok());
        assert!(GradPhiState::new(vec![0.5, 1.0, 0.0], false).is_err());
        assert!(GradPhiState::new(vec![0.0, -1.0, 0.0], true).is_err());
        assert!(GradPhiState::new(vec![0.0, -1.0, 0.0], false).is_ok());
        assert!(GradPhiState::new(vec![0.0, 0.0], false).is_err());
        let s = GradPhiState::flat(8, true).unwrap();
        assert_eq!(s.n_sites(), 8);
        assert!(s.is_integral());
        s.validate().unwrap();
    }

    #[test]
    fn zero_heights_give_zero_field() {
        let s = GradPhiState::flat(16, false).unwrap();
        assert!(s.fluctuation_field().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn field_rescales_by_root_n() {
        let mut heights = vec![0.0; 5];
        heights[2] = 3.0;
        let s = GradPhiState::new(heights, false).unwrap();
        let f = s.fluctuation_field();
        assert!((f.eval(0.5) - 3.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_equilibrium_has_bridge_midpoint_variance() {
        // Var(h_{N/2}) = N/4, so the rescaled field at 1/2 has variance 1/4.
        let n = 64;
        let samples = 10_000;
        let mut acc = Accumulator::new();
        let mut rng = stream(100, "gp-eq", 0);
        for _ in 0..samples {
            let s = gaussian_equilibrium(n, &mut rng).unwrap();
            assert_eq!(s.heights()[0], 0.0);
            assert_eq!(s.heights()[n], 0.0);
            let v = s.fluctuation_field().eval(0.5);
            acc.push(v * v);
        }
        // Var estimate of a squared centered Gaussian: Var(X²) = 2·Var(X)².
        let se = (2.0 * 0.25f64 * 0.25 / samples as f64).sqrt();
        assert!(
            (acc.mean() - 0.25).abs() < 3.0 * se,
            "midpoint variance {} vs 0.25 ± {}",
            acc.mean(),
            se
        );
    }
}
