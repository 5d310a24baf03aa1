//! Compactly supported C² test functions stored as grid samples.
//!
//! A [`TestFunction`] keeps samples of `φ`, `φ'`, `φ''` on its own uniform
//! grid together with the support interval. Two closed-form families ship:
//! the classic C^∞ bump `exp(1 − 1/(1−y²))` and the C² sine bump `sin³(πy)`.
//!
//! Pairings with lattice fields go through *hat weights*: for a field on the
//! grid `{k/L}` the weight `Φ(k/L) = L·∫ hat_k(x) φ(x) dx` is computed exactly
//! against the piecewise-linear representation of `φ`, and then
//! `∫ f φ = (1/L) Σ_k f(k/L) Φ(k/L)`. A single corner flip of a ±1 path
//! therefore changes `⟨v, φ⟩` by exactly `±2·(2N)^{−3/2}·Φ(k/(2N))`, which is
//! what the generator calculus in the other crates relies on.

use crate::error::CoreError;
use crate::field::{common_refinement, FluctuationField};

/// Smoothness class of a test function (the shipped families are C^∞ and C²;
/// tabulated functions are whatever their consistency check certifies).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    CInf,
    C2,
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    phi: FluctuationField,
    d1: FluctuationField,
    d2: FluctuationField,
    support: (f64, f64),
    smoothness: Smoothness,
}

/// Default sampling resolution for the shipped families. Pairing errors
/// against the true smooth function scale like the squared grid step.
pub const DEFAULT_RESOLUTION: usize = 4096;

impl TestFunction {
    /// C^∞ bump `A·exp(1 − 1/(1−y²))` with `y = (2x−s0−s1)/(s1−s0)`,
    /// supported on `[s0, s1]` and normalized to peak value `A`.
    pub fn bump(s0: f64, s1: f64, amplitude: f64, resolution: usize) -> Result<Self, CoreError> {
        check_support(s0, s1)?;
        let kappa = 2.0 / (s1 - s0);
        let f = |x: f64| {
            let y = (2.0 * x - s0 - s1) / (s1 - s0);
            if y.abs() >= 1.0 {
                return (0.0, 0.0, 0.0);
            }
            let r = 1.0 - y * y;
            let g = (1.0 - 1.0 / r).exp();
            let g1 = g * (-2.0 * y / (r * r));
            let g2 = g * (4.0 * y * y / (r * r * r * r) - 2.0 * (1.0 + 3.0 * y * y) / (r * r * r));
            (amplitude * g, amplitude * kappa * g1, amplitude * kappa * kappa * g2)
        };
        Self::from_closure(f, (s0, s1), Smoothness::CInf, resolution)
    }

    /// C² sine bump `A·sin³(π(x−s0)/(s1−s0))` on `[s0, s1]`.
    pub fn sine_bump(s0: f64, s1: f64, amplitude: f64, resolution: usize) -> Result<Self, CoreError> {
        check_support(s0, s1)?;
        let om = std::f64::consts::PI / (s1 - s0);
        let f = |x: f64| {
            if x <= s0 || x >= s1 {
                return (0.0, 0.0, 0.0);
            }
            let z = om * (x - s0);
            let (s, c) = z.sin_cos();
            (
                amplitude * s * s * s,
                amplitude * om * 3.0 * s * s * c,
                amplitude * om * om * (6.0 * s * c * c - 3.0 * s * s * s),
            )
        };
        Self::from_closure(f, (s0, s1), Smoothness::C2, resolution)
    }

    /// The zero test function (useful for switching one component off).
    pub fn zero(resolution: usize) -> Self {
        Self {
            phi: FluctuationField::zero(resolution),
            d1: FluctuationField::zero(resolution),
            d2: FluctuationField::zero(resolution),
            support: (0.0, 0.0),
            smoothness: Smoothness::CInf,
        }
    }

    fn from_closure(
        f: impl Fn(f64) -> (f64, f64, f64),
        support: (f64, f64),
        smoothness: Smoothness,
        resolution: usize,
    ) -> Result<Self, CoreError> {
        if resolution < 8 {
            return Err(CoreError::InvalidTestFunction(format!(
                "resolution {resolution} too coarse"
            )));
        }
        let mut phi = Vec::with_capacity(resolution + 1);
        let mut d1 = Vec::with_capacity(resolution + 1);
        let mut d2 = Vec::with_capacity(resolution + 1);
        for k in 0..=resolution {
            let (a, b, c) = f(k as f64 / resolution as f64);
            phi.push(a);
            d1.push(b);
            d2.push(c);
        }
        Self::from_samples(phi, d1, d2, support, smoothness)
    }

    /// Builds a test function from samples, validating that it vanishes at and
    /// outside the support endpoints.
    pub fn from_samples(
        phi: Vec<f64>,
        d1: Vec<f64>,
        d2: Vec<f64>,
        support: (f64, f64),
        smoothness: Smoothness,
    ) -> Result<Self, CoreError> {
        if phi.len() != d1.len() || phi.len() != d2.len() {
            return Err(CoreError::InvalidTestFunction("sample arrays differ in length".into()));
        }
        let field = FluctuationField::new(phi)
            .map_err(|e| CoreError::InvalidTestFunction(e.to_string()))?;
        let l = field.resolution();
        for (k, &v) in field.values().iter().enumerate() {
            let x = k as f64 / l as f64;
            if (x <= support.0 || x >= support.1) && v != 0.0 {
                return Err(CoreError::InvalidTestFunction(format!(
                    "φ({x}) = {v} outside the declared support"
                )));
            }
        }
        Ok(Self {
            phi: field,
            d1: FluctuationField::new(d1).map_err(|e| CoreError::InvalidTestFunction(e.to_string()))?,
            d2: FluctuationField::new(d2).map_err(|e| CoreError::InvalidTestFunction(e.to_string()))?,
            support,
            smoothness,
        })
    }

    pub fn resolution(&self) -> usize {
        self.phi.resolution()
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn phi(&self) -> &FluctuationField {
        &self.phi
    }

    pub fn first_derivative(&self) -> &FluctuationField {
        &self.d1
    }

    pub fn second_derivative(&self) -> &FluctuationField {
        &self.d2
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.phi.eval(x)
    }

    pub fn eval_d2(&self, x: f64) -> f64 {
        self.d2.eval(x)
    }

    /// Exact `∫ φ²` of the sampled representation.
    pub fn l2_norm_sq(&self) -> f64 {
        self.phi.l2_norm_sq()
    }

    /// `∫ f φ` for a lattice field, via hat weights on the field's grid.
    pub fn pair(&self, f: &FluctuationField) -> Result<f64, CoreError> {
        let w = self.hat_weights(f.resolution())?;
        Ok(dot(f.values(), &w) / f.resolution() as f64)
    }

    /// `∫ f φ''` for a lattice field.
    pub fn pair_d2(&self, f: &FluctuationField) -> Result<f64, CoreError> {
        let w = hat_weights_of(&self.d2, f.resolution())?;
        Ok(dot(f.values(), &w) / f.resolution() as f64)
    }

    /// Hat weights `Φ(k/l) = l·∫ hat_k φ`, `k = 0..=l`, computed exactly
    /// against the piecewise-linear samples of `φ`.
    pub fn hat_weights(&self, l: usize) -> Result<Vec<f64>, CoreError> {
        hat_weights_of(&self.phi, l)
    }

    /// Hat weights for `φ''` (same construction, used by generator calculus).
    pub fn hat_weights_d2(&self, l: usize) -> Result<Vec<f64>, CoreError> {
        hat_weights_of(&self.d2, l)
    }

    /// Max deviation between the stored `φ''` and second central differences
    /// of the stored `φ` (interior nodes). A cheap consistency certificate:
    /// for the shipped families it scales like the squared grid step times the
    /// fourth derivative.
    pub fn fd_consistency(&self) -> f64 {
        let l = self.resolution();
        let h = 1.0 / l as f64;
        let phi = self.phi.values();
        let d2 = self.d2.values();
        let mut worst: f64 = 0.0;
        for k in 1..l {
            let fd = (phi[k + 1] - 2.0 * phi[k] + phi[k - 1]) / (h * h);
            worst = worst.max((fd - d2[k]).abs());
        }
        worst
    }
}

fn check_support(s0: f64, s1: f64) -> Result<(), CoreError> {
    if !(0.0 <= s0 && s0 < s1 && s1 <= 1.0) {
        return Err(CoreError::InvalidTestFunction(format!(
            "support [{s0}, {s1}] must be a nonempty subinterval of [0,1]"
        )));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact hat weights of a piecewise-linear `g` against the grid `{k/l}`:
/// one sweep over the common refinement; every fine cell contributes to the
/// two hats covering it, with the product of two linear factors integrated in
/// closed form.
fn hat_weights_of(g: &FluctuationField, l: usize) -> Result<Vec<f64>, CoreError> {
    if l == 0 {
        return Err(CoreError::FieldTooShort(1));
    }
    let t = common_refinement(l, g.resolution())?;
    let fine = g.resample(t); // exact: t is a multiple of g's resolution
    let r = t / l; // fine cells per coarse cell
    let ht = 1.0 / t as f64;
    let mut weights = vec![0.0; l + 1];
    for k in 0..l {
        for j in 0..r {
            let idx = k * r + j;
            let (g0, g1) = (fine.values()[idx], fine.values()[idx + 1]);
            if g0 == 0.0 && g1 == 0.0 {
                continue;
            }
            // rising hat factor (l·x − k) at the cell endpoints
            let a0 = j as f64 / r as f64;
            let a1 = (j + 1) as f64 / r as f64;
            // ∫ cell (linear g)·(linear a): exact two-point rule
            let rising = ht / 6.0 * (2.0 * g0 * a0 + g0 * a1 + g1 * a0 + 2.0 * g1 * a1);
            let falling = ht / 6.0
                * (2.0 * g0 * (1.0 - a0) + g0 * (1.0 - a1) + g1 * (1.0 - a0) + 2.0 * g1 * (1.0 - a1));
            weights[k] += falling;
            weights[k + 1] += rising;
        }
    }
    for w in &mut weights {
        *w *= l as f64;
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_vanishes_at_support_with_derivatives() {
        let b = TestFunction::bump(0.25, 0.75, 1.0, 1024).unwrap();
        assert_eq!(b.eval(0.25), 0.0);
        assert_eq!(b.eval(0.75), 0.0);
        assert_eq!(b.eval(0.1), 0.0);
        assert_abs_diff_eq!(b.eval(0.5), 1.0, epsilon = 1e-12);
        // symmetric: φ'' at the centre is negative (a maximum)
        assert!(b.eval_d2(0.5) < 0.0);
    }

    #[test]
    fn finite_difference_consistency_of_shipped_families() {
        // empirical certificates at the default resolution; both scale ~ h²
        let b = TestFunction::bump(0.3, 0.7, 1.0, DEFAULT_RESOLUTION).unwrap();
        assert!(b.fd_consistency() < 0.1, "bump fd consistency {}", b.fd_consistency());
        // The C² family has a third-derivative jump of 6Aω³ at the support
        // edge; grid nodes straddling that edge see a central-difference
        // discrepancy of order ω³h, which dominates the interior h² error.
        let s = TestFunction::sine_bump(0.3, 0.7, 1.0, DEFAULT_RESOLUTION).unwrap();
        assert!(s.fd_consistency() < 0.1, "sine fd consistency {}", s.fd_consistency());
    }

    #[test]
    fn hat_weights_sum_to_integral() {
        // Σ_k Φ(k/l)/l = ∫ φ because the hats partition unity
        let b = TestFunction::sine_bump(0.2, 0.9, 0.7, 512).unwrap();
        for l in [8usize, 32, 128] {
            let w = b.hat_weights(l).unwrap();
            let total: f64 = w.iter().sum::<f64>() / l as f64;
            assert_abs_diff_eq!(total, b.phi().integral(), epsilon = 1e-12);
        }
    }

    #[test]
    fn pairing_agrees_with_direct_quadrature() {
        let b = TestFunction::bump(0.3, 0.7, 2.0, 2048).unwrap();
        let l = 64;
        let f = FluctuationField::new(
            (0..=l).map(|k| ((k as f64 / l as f64) * 3.0).sin()).collect(),
        )
        .unwrap();
        let via_weights = b.pair(&f).unwrap();
        let direct = f.integral_product(b.phi()).unwrap();
        assert_abs_diff_eq!(via_weights, direct, epsilon = 1e-13);
    }

    #[test]
    fn pairing_error_against_fine_reference_is_quadratic() {
        // compare a coarse sampling of φ against a much finer one; the
        // documented tolerance is 10·h² relative, h the coarse step
        let coarse = TestFunction::bump(0.3, 0.7, 1.0, 256).unwrap();
        let fine = TestFunction::bump(0.3, 0.7, 1.0, 8192).unwrap();
        let l = 128;
        let f = FluctuationField::new(
            (0..=l).map(|k| (k as f64 / l as f64) * (1.0 - k as f64 / l as f64)).collect(),
        )
        .unwrap();
        let a = coarse.pair(&f).unwrap();
        let b = fine.pair(&f).unwrap();
        let h = 1.0 / 256.0;
        assert!((a - b).abs() <= 10.0 * h * h * b.abs().max(1.0), "err {}", (a - b).abs());
    }

    #[test]
    fn flip_increment_matches_hat_weight() {
        // ⟨v,φ⟩ changes by exactly Δv(k)·(2N)^{-3/2}·Φ(k/(2N)) under a flip
        use crate::path::{PathPair, Role};
        let two_n = 16;
        let phi = TestFunction::sine_bump(0.1, 0.9, 1.3, 1024).unwrap();
        let w = phi.hat_weights(two_n).unwrap();
        let a = PathPair::tent(two_n);
        let mut b = a.clone();
        let k = two_n / 2; // the apex is the only corner of the tent
        let delta = (a.w()[k + 1] - 2 * a.w()[k] + a.w()[k - 1]) as f64; // flip size
        b.flip(Role::W, k);
        let (_, aw) = a.rescaled();
        let (_, bw) = b.rescaled();
        let before = phi.pair(&aw).unwrap();
        let after = phi.pair(&bw).unwrap();
        let expect = delta * (two_n as f64).powf(-1.5) * w[k];
        assert_abs_diff_eq!(after - before, expect, epsilon = 1e-13);
    }

    #[test]
    fn zero_function_pairs_to_zero() {
        let z = TestFunction::zero(64);
        let f = FluctuationField::new(vec![1.0; 65]).unwrap();
        assert_eq!(z.pair(&f).unwrap(), 0.0);
        assert_eq!(z.l2_norm_sq(), 0.0);
    }

    #[test]
    fn rejects_nonvanishing_support() {
        let r = TestFunction::from_samples(
            vec![0.0, 1.0, 1.0],
            vec![0.0; 3],
            vec![0.0; 3],
            (0.25, 0.75),
            Smoothness::C2,
        );
        assert!(r.is_err());
    }
}
