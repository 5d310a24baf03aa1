//! Lipschitz contraction of the resolvent in the coupling metric.
//!
//! For the coupled dynamics the resolvent is a `1/λ`-contraction on Lipschitz
//! seminorms.  On an enumerated space both seminorms are computed exactly as
//! suprema over all state pairs, for randomized test functions built from the
//! metric itself: distances to random anchor states and min-combinations of
//! them with random offsets (all 1-Lipschitz by the triangle inequality).

use rand::Rng;

use crate::error::VerifyError;
use crate::generator::FiniteGenerator;
use crate::resolvent::resolvent_solve;

/// Empirical contraction report over randomized Lipschitz functions.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzReport {
    pub lambda: f64,
    /// Trial functions requested.
    pub trials: u32,
    /// Trials that produced a non-constant function and entered the supremum.
    pub evaluated: u32,
    /// Largest observed ratio `[R_λ f]_Lip / [f]_Lip`.
    pub max_ratio: f64,
    /// The contraction ceiling `1/λ`.
    pub bound: f64,
}

/// Exact Lipschitz seminorm of a state function in the generator's metric.
///
/// Pairs at metric distance zero must carry equal values; otherwise the
/// seminorm is unbounded and `+∞` is returned.
pub fn lipschitz_seminorm(g: &FiniteGenerator, f: &[f64]) -> Result<f64, VerifyError> {
    let n = g.n_states();
    if f.len() != n {
        return Err(VerifyError::BadParameter(format!(
            "function has length {}, expected {n}",
            f.len()
        )));
    }
    let mut sup: f64 = 0.0;
    for x in 0..n {
        for y in (x + 1)..n {
            let gap = (f[x] - f[y]).abs();
            let d = g.distance(x, y);
            if d > 0.0 {
                sup = sup.max(gap / d);
            } else if gap > 0.0 {
                return Ok(f64::INFINITY);
            }
        }
    }
    Ok(sup)
}

/// Measures `[R_λ f]_Lip / [f]_Lip` over randomized Lipschitz trial functions
/// and reports the largest ratio together with the ceiling `1/λ`.
pub fn lipschitz_ratio<R: Rng + ?Sized>(
    g: &FiniteGenerator,
    lambda: f64,
    trials: u32,
    rng: &mut R,
) -> Result<LipschitzReport, VerifyError> {
    if trials == 0 {
        return Err(VerifyError::BadParameter("need at least one trial".into()));
    }
    let n = g.n_states();
    if g.metric_table().is_none() {
        return Err(VerifyError::UnsupportedOperation(format!(
            "exact seminorms need the materialized metric table; {n} states is too many"
        )));
    }
    let diameter = (0..n)
        .flat_map(|x| ((x + 1)..n).map(move |y| (x, y)))
        .fold(0.0f64, |acc, (x, y)| acc.max(g.distance(x, y)));

    let mut max_ratio: f64 = 0.0;
    let mut evaluated = 0u32;
    for _ in 0..trials {
        let f = random_lipschitz_function(g, diameter, rng);
        let base = lipschitz_seminorm(g, &f)?;
        if base <= 1e-14 {
            continue;
        }
        let sol = resolvent_solve(g, lambda, &f)?;
        let image = lipschitz_seminorm(g, &sol.big_f)?;
        max_ratio = max_ratio.max(image / base);
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(VerifyError::BadParameter(
            "every trial function degenerated to a constant".into(),
        ));
    }
    Ok(LipschitzReport { lambda, trials, evaluated, max_ratio, bound: 1.0 / lambda })
}

/// A random 1-Lipschitz function: a distance to a random anchor, a
/// min-combination of offset anchor distances, or an average of two anchor
/// distances.
fn random_lipschitz_function<R: Rng + ?Sized>(
    g: &FiniteGenerator,
    diameter: f64,
    rng: &mut R,
) -> Vec<f64> {
    let n = g.n_states();
    let anchor_distance = |a: usize| -> Vec<f64> { (0..n).map(|x| g.distance(x, a)).collect() };
    match rng.gen_range(0..3u8) {
        0 => anchor_distance(rng.gen_range(0..n)),
        1 => {
            let k = rng.gen_range(2..=3usize);
            let parts: Vec<(Vec<f64>, f64)> = (0..k)
                .map(|_| {
                    (anchor_distance(rng.gen_range(0..n)), rng.gen::<f64>() * diameter)
                })
                .collect();
            (0..n)
                .map(|x| {
                    parts
                        .iter()
                        .map(|(d, c)| d[x] + c)
                        .fold(f64::INFINITY, f64::min)
                })
                .collect()
        }
        _ => {
            let a = anchor_distance(rng.gen_range(0..n));
            let b = anchor_distance(rng.gen_range(0..n));
            a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{linear_tau, reflected_generator, zrp_generator};
    use fluctua_core::rng::stream;

    #[test]
    fn resolvent_contracts_lipschitz_seminorms() {
        for two_n in [2u32, 4, 6] {
            let g = reflected_generator(two_n).unwrap();
            for lambda in [0.5, 1.0, 2.0] {
                let mut rng = stream(29, "lipschitz-unit", u64::from(two_n));
                let trials = if two_n == 6 { 40 } else { 100 };
                let report = lipschitz_ratio(&g, lambda, trials, &mut rng).unwrap();
                assert!(report.evaluated > 0);
                assert!(
                    report.max_ratio <= report.bound + 1e-9,
                    "2N={two_n}, λ={lambda}: ratio {} above {}",
                    report.max_ratio,
                    report.bound
                );
            }
        }
    }

    #[test]
    fn seminorm_is_affine_invariant_and_vanishes_on_constants() {
        let g = reflected_generator(4).unwrap();
        let f: Vec<f64> = (0..g.n_states()).map(|x| g.distance(x, 3)).collect();
        let shifted: Vec<f64> = f.iter().map(|x| 3.0 * x - 7.0).collect();
        let base = lipschitz_seminorm(&g, &f).unwrap();
        let scaled = lipschitz_seminorm(&g, &shifted).unwrap();
        assert!((scaled - 3.0 * base).abs() <= 1e-12 * base);

        let constant = vec![4.2; g.n_states()];
        assert_eq!(lipschitz_seminorm(&g, &constant).unwrap(), 0.0);

        // The contraction ratio itself is invariant under rescaling.
        let sol_f = resolvent_solve(&g, 1.0, &f).unwrap();
        let sol_s = resolvent_solve(&g, 1.0, &shifted).unwrap();
        let r1 = lipschitz_seminorm(&g, &sol_f.big_f).unwrap() / base;
        let r2 = lipschitz_seminorm(&g, &sol_s.big_f).unwrap() / scaled;
        assert!((r1 - r2).abs() <= 1e-10);
    }

    #[test]
    fn zero_range_chains_contract_too() {
        let g = zrp_generator(3, 3, &linear_tau(3)).unwrap();
        let mut rng = stream(29, "lipschitz-unit-zrp", 0);
        let report = lipschitz_ratio(&g, 1.0, 60, &mut rng).unwrap();
        assert!(report.max_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn oversized_spaces_are_rejected() {
        let g = zrp_generator(8, 8, &linear_tau(8)).unwrap();
        let mut rng = stream(29, "lipschitz-unit-big", 0);
        assert!(matches!(
            lipschitz_ratio(&g, 1.0, 5, &mut rng),
            Err(VerifyError::UnsupportedOperation(_))
        ));
    }
}
