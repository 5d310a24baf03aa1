//! Concatenation of two excursions into a path pinned to zero at an
//! interior point `r`.
//!
//! `T_r(u1, u2)(x) = √r·u1(x/r)` for `x ≤ r` and `√(1−r)·u2((x−r)/(1−r))`
//! for `x > r`.  When `u1, u2` are independent normalized excursions, the
//! result is the excursion law conditioned to vanish at `r` (the prefactor
//! density of the conditioning is handled by the caller).

use crate::error::OracleError;
use crate::excursion::sample_excursion;
use fluctua_core::field::FluctuationField;
use rand::Rng;

/// Deterministic concatenation on the merged grid.
///
/// `u1` occupies the first `k` cells and `u2` the remaining ones, so `r`
/// must equal `k / (k + resolution(u2))` to machine precision: the output
/// grid has a node exactly at the pinning point.
pub fn concat_t_r(
    u1: &FluctuationField,
    u2: &FluctuationField,
    r: f64,
) -> Result<FluctuationField, OracleError> {
    let k = u1.resolution();
    let l = k + u2.resolution();
    let grid_r = k as f64 / l as f64;
    if (r - grid_r).abs() > 1e-12 {
        return Err(OracleError::BadParameter(format!(
            "pinning point {r} is not the junction node {grid_r} of the merged grid"
        )));
    }
    let left_scale = r.sqrt();
    let right_scale = (1.0 - r).sqrt();
    let junction_gap =
        (left_scale * u1.values()[k] - right_scale * u2.values()[0]).abs();
    if junction_gap > 1e-12 {
        return Err(OracleError::BadParameter(format!(
            "pieces disagree at the junction by {junction_gap}"
        )));
    }
    let mut out = Vec::with_capacity(l + 1);
    for j in 0..=l {
        if j <= k {
            out.push(left_scale * u1.values()[j]);
        } else {
            out.push(right_scale * u2.values()[j - k]);
        }
    }
    Ok(FluctuationField::new(out)?)
}

/// Excursion conditioned to vanish at interior time `r`, sampled exactly at
/// the grid nodes by concatenating two independent rescaled excursions.
///
/// `r` must sit on the grid: `r·resolution` has to be a whole number of
/// cells, strictly between 0 and `resolution`.
pub fn sample_conditioned_excursion<R: Rng + ?Sized>(
    resolution: usize,
    r: f64,
    rng: &mut R,
) -> Result<FluctuationField, OracleError> {
    if resolution < 6 {
        return Err(OracleError::GridTooCoarse(resolution));
    }
    let cells = r * resolution as f64;
    let k = cells.round() as i64;
    if (cells - k as f64).abs() > 1e-9 {
        return Err(OracleError::BadParameter(format!(
            "pinning point {r} is off-grid for resolution {resolution}"
        )));
    }
    if k < 3 || k > resolution as i64 - 3 {
        return Err(OracleError::BadParameter(format!(
            "pinning point {r} leaves fewer than three cells on one side"
        )));
    }
    let k = k as usize;
    let u1 = sample_excursion(k, rng)?;
    let u2 = sample_excursion(resolution - k, rng)?;
    let path = concat_t_r(&u1, &u2, k as f64 / resolution as f64)?;
    assert_eq!(path.values()[k], 0.0, "conditioned path must vanish at r");
    debug_assert!(path.values().iter().all(|&v| v >= 0.0));
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excursion::excursion_marginal_cdf;
    use fluctua_core::rng::stream;
    use fluctua_core::stats::ks_test;

    #[test]
    fn zero_pieces_concatenate_to_zero() {
        let u1 = FluctuationField::zero(8);
        let u2 = FluctuationField::zero(24);
        let out = concat_t_r(&u1, &u2, 0.25).unwrap();
        assert_eq!(out.resolution(), 32);
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn halves_are_scaled_copies_at_r_half() {
        let vals: Vec<f64> = (0..=16)
            .map(|j| (j as f64 / 16.0) * (1.0 - j as f64 / 16.0))
            .collect();
        let u = FluctuationField::new(vals.clone()).unwrap();
        let out = concat_t_r(&u, &u, 0.5).unwrap();
        let s = 0.5f64.sqrt();
        for j in 0..=16 {
            assert!((out.values()[j] - s * vals[j]).abs() < 1e-15);
            assert!((out.values()[16 + j] - s * vals[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn conditioned_sample_vanishes_exactly_at_r() {
        let mut rng = stream(60, "cond-zero", 0);
        for _ in 0..20 {
            let path = sample_conditioned_excursion(64, 0.25, &mut rng).unwrap();
            assert_eq!(path.eval(0.25), 0.0);
            assert_eq!(path.values()[0], 0.0);
            assert_eq!(path.values()[64], 0.0);
            assert!(path.values().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn left_half_marginal_matches_rescaled_excursion() {
        // Under the conditioned law with pin at r, the value at r/2 is
        // √r·e(1/2) for an independent excursion e, so its CDF at x is the
        // excursion marginal CDF at x/√r, t = 1/2.
        let r = 0.5;
        let n = 20_000usize;
        let mut samples = Vec::with_capacity(n);
        let mut rng = stream(61, "cond-ks", 0);
        for _ in 0..n {
            let path = sample_conditioned_excursion(128, r, &mut rng).unwrap();
            samples.push(path.eval(r / 2.0));
        }
        let root_r = r.sqrt();
        let report = ks_test(&samples, |x| excursion_marginal_cdf(x / root_r, 0.5).unwrap())
            .unwrap();
        assert!(
            report.p_value > 0.01,
            "KS p = {} (D = {})",
            report.p_value,
            report.statistic
        );
    }

    #[test]
    fn off_grid_and_edge_pins_are_rejected() {
        let mut rng = stream(62, "cond-rej", 0);
        assert!(sample_conditioned_excursion(64, 0.013, &mut rng).is_err());
        assert!(sample_conditioned_excursion(64, 1.0 / 64.0, &mut rng).is_err());
        assert!(sample_conditioned_excursion(64, 63.0 / 64.0, &mut rng).is_err());
        let u1 = FluctuationField::zero(8);
        let u2 = FluctuationField::zero(24);
        assert!(concat_t_r(&u1, &u2, 0.3).is_err());
    }
}
