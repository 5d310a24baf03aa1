//! Splitting the pair generator into free motion and reflection correction.
//!
//! Away from contacts the two ordered paths flip corners independently; the
//! full generator therefore decomposes as `L = L^A + L^R`, where `L^A` applies
//! the free corner-flip dynamics of each path (evaluating the characteristic
//! observable through its closed formula even on moves that would leave the
//! ordered state space) and `L^R` is the correction supported exactly on
//! states with a contact corner.  Both parts are evaluated in closed form per
//! site, so the split can also be averaged over Monte Carlo samples at sizes
//! far beyond enumeration.

use fluctua_core::path::{corner_at, Corner, PathPair};
use fluctua_core::TestFunction;
use num_complex::Complex64;

use crate::error::VerifyError;
use crate::generator::FiniteGenerator;

/// Precomputed per-site pairing increments for one `(φv, φw)` pair at a fixed
/// lattice size: flipping a corner at site `k` changes the pairing phase by
/// `δ·coef[k]`, where `δ = ±2` is the height change.
#[derive(Debug, Clone)]
pub struct PairCoefficients {
    two_n: usize,
    /// One corner-flip rate unit, `(2N)²/4`.
    unit: f64,
    coef_v: Vec<f64>,
    coef_w: Vec<f64>,
}

impl PairCoefficients {
    pub fn new(
        two_n: u32,
        phi_v: &TestFunction,
        phi_w: &TestFunction,
    ) -> Result<Self, VerifyError> {
        if two_n < 2 || two_n % 2 != 0 {
            return Err(VerifyError::BadParameter(format!(
                "pair length must be a positive even number, got {two_n}"
            )));
        }
        let l = two_n as usize;
        // Pairing = Σ_k (height_k/√(2N))·w(k)/(2N); one height unit at node k
        // contributes w(k)/((2N)^{3/2}).
        let scale = 1.0 / (l as f64 * (l as f64).sqrt());
        let coef_v = phi_v.hat_weights(l)?.iter().map(|w| w * scale).collect();
        let coef_w = phi_w.hat_weights(l)?.iter().map(|w| w * scale).collect();
        let unit = (l * l) as f64 / 4.0;
        Ok(PairCoefficients { two_n: l, unit, coef_v, coef_w })
    }

    /// Pairing phase `⟨v, φv⟩ + ⟨w, φw⟩` of a state.
    pub fn phase(&self, pair: &PathPair) -> f64 {
        pair.v()
            .iter()
            .zip(&self.coef_v)
            .chain(pair.w().iter().zip(&self.coef_w))
            .map(|(&h, c)| h as f64 * c)
            .sum()
    }
}

/// The generator action on `ψφ` at one state, split into parts.
#[derive(Debug, Clone, Copy)]
pub struct PairAction {
    /// `ψφ(x)` itself.
    pub psi: Complex64,
    /// Full action `(Lψφ)(x)`.
    pub full: Complex64,
    /// Free-motion part `(L^Aψφ)(x)`.
    pub bulk: Complex64,
    /// Reflection correction `(L^Rψφ)(x)`; zero off contact corners.
    pub reflection: Complex64,
}

/// Evaluates the split generator action at one state in closed form.
pub fn pair_action(pair: &PathPair, coef: &PairCoefficients) -> PairAction {
    assert_eq!(pair.two_n(), coef.two_n, "coefficient table built for another size");
    let psi = Complex64::new(0.0, coef.phase(pair)).exp();
    let v = pair.v();
    let w = pair.w();
    let mut bulk = Complex64::new(0.0, 0.0);
    let mut reflection = Complex64::new(0.0, 0.0);
    for k in 1..coef.two_n {
        let cv = corner_at(v, k);
        let cw = corner_at(w, k);
        let dv = (v[k - 1] + v[k + 1] - 2 * v[k]) as f64 * coef.coef_v[k];
        let dw = (w[k - 1] + w[k + 1] - 2 * w[k]) as f64 * coef.coef_w[k];
        let zv = Complex64::new(0.0, dv).exp() - 1.0;
        let zw = Complex64::new(0.0, dw).exp() - 1.0;
        // Free motion: every corner of either path flips at 2 units.
        if cv.is_some() {
            bulk += zv.scale(2.0);
        }
        if cw.is_some() {
            bulk += zw.scale(2.0);
        }
        // At a contact corner the true moves are one lone flip of the free
        // path at 2 units plus the joint flip at 1 unit; the correction is
        // their difference from the free motion.
        if pair.is_contact(k) {
            if let Some(corner) = cv {
                let z_free = match corner {
                    Corner::Up => zw,
                    Corner::Down => zv,
                };
                let z_joint = Complex64::new(0.0, dv + dw).exp() - 1.0;
                reflection += z_free.scale(2.0) + z_joint - zv.scale(2.0) - zw.scale(2.0);
            }
        }
    }
    let scale = coef.unit;
    PairAction {
        psi,
        full: (bulk + reflection) * psi.scale(scale),
        bulk: bulk * psi.scale(scale),
        reflection: reflection * psi.scale(scale),
    }
}

/// The split action over a whole enumerated pair space.
#[derive(Debug, Clone)]
pub struct SplitAction {
    pub psi: Vec<Complex64>,
    pub bulk: Vec<Complex64>,
    pub reflection: Vec<Complex64>,
}

/// Evaluates `L^Aψφ` and `L^Rψφ` on every state of a reflected-pair
/// generator.
pub fn split_generator_action(
    g: &FiniteGenerator,
    phi_v: &TestFunction,
    phi_w: &TestFunction,
) -> Result<SplitAction, VerifyError> {
    let pairs = g.reflected_states().ok_or_else(|| {
        VerifyError::UnsupportedOperation("generator split requires the reflected pair".into())
    })?;
    let coef = PairCoefficients::new(pairs[0].two_n() as u32, phi_v, phi_w)?;
    let mut psi = Vec::with_capacity(pairs.len());
    let mut bulk = Vec::with_capacity(pairs.len());
    let mut reflection = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let action = pair_action(pair, &coef);
        psi.push(action.psi);
        bulk.push(action.bulk);
        reflection.push(action.reflection);
    }
    Ok(SplitAction { psi, bulk, reflection })
}
