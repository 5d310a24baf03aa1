//! Property tests: the structural identities behind the verification layer
//! hold across randomized parameters, not just at hand-picked values.

use fluctua_core::TestFunction;
use fluctua_verify::{
    lipschitz_seminorm, linear_tau, reflected_generator, resolvent_identity_gap, resolvent_solve,
    verify_discrete_ibpf, zrp_generator, FiniteGenerator, PsiPairing,
};
use proptest::prelude::*;

fn random_f(g: &FiniteGenerator, anchor: usize, scale: f64, shift: f64) -> Vec<f64> {
    (0..g.n_states()).map(|x| scale * g.distance(x, anchor % g.n_states()) + shift).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn resolvent_identity_holds_for_random_parameters(
        lambda in 0.3f64..3.0,
        mu in 0.3f64..3.0,
        anchor in 0usize..1000,
        scale in 0.2f64..2.0,
        shift in -1.0f64..1.0,
    ) {
        let g = reflected_generator(4).unwrap();
        let f = random_f(&g, anchor, scale, shift);
        let gap = resolvent_identity_gap(&g, lambda, mu, &f).unwrap();
        let norm = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        prop_assert!(gap <= 1e-9 * (1.0 + norm), "gap {gap}");
    }

    #[test]
    fn discrete_identity_holds_for_random_bumps(
        lambda in 0.4f64..2.5,
        s0 in 0.05f64..0.35,
        width in 0.25f64..0.55,
        amp in 0.3f64..1.5,
        anchor in 0usize..1000,
    ) {
        let phi = TestFunction::bump(s0, s0 + width, amp, 64).unwrap();
        for g in [
            reflected_generator(4).unwrap(),
            zrp_generator(3, 3, &linear_tau(3)).unwrap(),
        ] {
            let f = random_f(&g, anchor, 1.0, 0.0);
            let pairing = match g.reflected_states() {
                Some(_) => PsiPairing::Pair(&phi, &phi),
                None => PsiPairing::Single(&phi),
            };
            let report = verify_discrete_ibpf(&g, lambda, &f, &pairing).unwrap();
            prop_assert!(
                report.scaled_violation() <= 1e-10,
                "{}: violation {}",
                g.label(),
                report.scaled_violation()
            );
        }
    }

    #[test]
    fn resolvent_preserves_positivity_and_sup_bound(
        lambda in 0.3f64..4.0,
        anchor in 0usize..1000,
        shift in 0.0f64..2.0,
    ) {
        let g = reflected_generator(4).unwrap();
        let f = random_f(&g, anchor, 1.0, shift);
        let sol = resolvent_solve(&g, lambda, &f).unwrap();
        let f_norm = f.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for &v in &sol.big_f {
            prop_assert!(v >= -1e-12, "negative value {v}");
            prop_assert!(lambda * v <= f_norm + 1e-9 * (1.0 + f_norm), "sup bound broken: {v}");
        }
    }

    #[test]
    fn resolvent_never_expands_lipschitz_seminorms_randomly(
        lambda in 0.5f64..3.0,
        anchor in 0usize..1000,
    ) {
        let g = reflected_generator(4).unwrap();
        let f = random_f(&g, anchor, 1.0, 0.0);
        let base = lipschitz_seminorm(&g, &f).unwrap();
        prop_assume!(base > 1e-12);
        let sol = resolvent_solve(&g, lambda, &f).unwrap();
        let image = lipschitz_seminorm(&g, &sol.big_f).unwrap();
        prop_assert!(image / base <= 1.0 / lambda + 1e-9, "ratio {}", image / base);
    }

    #[test]
    fn random_rational_rate_tables_keep_exact_stationarity(
        t1 in 1u64..5,
        t2 in 1u64..5,
        t3 in 1u64..5,
        sites in 3usize..5,
    ) {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        let tau: Vec<BigRational> = [t1, t2, t3]
            .iter()
            .map(|&t| BigRational::new(BigInt::from(t), BigInt::from(2)))
            .collect();
        let g = zrp_generator(sites, 3, &tau).unwrap();
        let report = g.stationarity_report();
        prop_assert!(report.is_exact(), "residual {}", report.residual());
    }
}
