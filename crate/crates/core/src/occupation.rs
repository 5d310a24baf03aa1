//! Occupation vectors for particle systems on `{1, …, N}`.

use crate::error::CoreError;
use crate::field::FluctuationField;

/// Total particle number carried by `n_sites` at mean density `density`.
pub fn target_particles(n_sites: usize, density: f64) -> u64 {
    (n_sites as f64 * density).floor() as u64
}

/// Site occupations `n(1), …, n(N)` together with the nominal density `n̄`.
/// The particle number is pinned to `⌊N·n̄⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationVector {
    counts: Vec<u32>,
    density: f64,
}

impl OccupationVector {
    pub fn new(counts: Vec<u32>, density: f64) -> Result<Self, CoreError> {
        if counts.is_empty() {
            return Err(CoreError::InvalidOccupation("no sites".into()));
        }
        if !(density.is_finite() && density > 0.0) {
            return Err(CoreError::InvalidOccupation(format!("bad density {density}")));
        }
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        let target = target_particles(counts.len(), density);
        if total != target {
            return Err(CoreError::InvalidOccupation(format!(
                "{total} particles on {} sites, want ⌊N·n̄⌋ = {target}",
                counts.len()
            )));
        }
        Ok(Self { counts, density })
    }

    pub fn sites(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Centred height field `u(k/N) = N^{-1/2} Σ_{j≤k} (n(j) − n̄)`.
    ///
    /// The field starts at 0 and ends at `(⌊N·n̄⌋ − N·n̄)/√N`, which vanishes
    /// whenever `N·n̄` is an integer.
    pub fn height_field(&self) -> FluctuationField {
        let n = self.sites();
        let s = 1.0 / (n as f64).sqrt();
        let mut values = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for &c in &self.counts {
            acc += c as f64 - self.density;
            values.push(acc * s);
        }
        FluctuationField::new(values).expect("finite by construction")
    }

    /// CSV serialization: header `site,count`, 1-based sites.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("site,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn height_field_example() {
        // N = 2, n̄ = 1, occupations (2,0): u(1/2) = (2−1)/√2 = 1/√2
        let occ = OccupationVector::new(vec![2, 0], 1.0).unwrap();
        let u = occ.height_field();
        assert_abs_diff_eq!(u.eval(0.5), 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(u.eval(0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u.eval(1.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn endpoint_reflects_floor_correction() {
        // N = 3, n̄ = 0.5: ⌊1.5⌋ = 1 particle; endpoint = (1 − 1.5)/√3
        let occ = OccupationVector::new(vec![0, 1, 0], 0.5).unwrap();
        let u = occ.height_field();
        assert_abs_diff_eq!(u.eval(1.0), -0.5 / 3f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn particle_count_is_validated() {
        assert!(OccupationVector::new(vec![1, 1, 1], 1.0).is_ok());
        assert!(OccupationVector::new(vec![1, 1], 1.5).err().is_some());
        assert!(OccupationVector::new(vec![2, 1], 1.5).is_ok()); // ⌊3⌋ = 3
    }
}
