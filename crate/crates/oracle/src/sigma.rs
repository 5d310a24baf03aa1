//! Stationary-identity functionals of the continuum limits.
//!
//! For the single interface the invariant law `m` is the scaled Brownian
//! bridge and the generator acts on `ψφ(u) = exp(i⟨u,φ⟩)` with density
//! `ic⟨u,φ''⟩ − (σ²/2)‖φ‖²` against `m`; [`sigma_limit_zrp`] estimates
//! `∫F·ψφ·(ic⟨u,φ''⟩ − (σ²/2)‖φ‖²) dm` by Monte Carlo, split into its
//! drift and mass parts.  For `F ≡ 1` everything is Gaussian and
//! [`sigma_zrp_gaussian_reference`] evaluates the same discrete functional
//! in closed form; invariance makes the total vanish in the continuum.
//!
//! For the ordered pair the invariant law is the image of
//! (bridge S, excursion D) under `v = (S+D)/√2, w = (S−D)/√2`, and the
//! generator density against it splits into an absolutely continuous bulk
//! `½(i⟨v,φv''⟩ + i⟨w,φw''⟩ − ‖φv‖² − ‖φw‖²)` plus a singular boundary
//! piece supported on configurations with a pinned contact:
//! `(i/2)∫dr (2πr³(1−r)³)^{-1/2} φD(r) E[F·ψφ | D(r) = 0]`,
//! with `φD = (φv−φw)/√2` and the conditional law realized by concatenating
//! two rescaled excursions.  [`sigma_limit_pair`] estimates both pieces.

use crate::bridge::BridgeLaw;
use crate::concat::sample_conditioned_excursion;
use crate::error::OracleError;
use crate::excursion::sample_excursion;
use crate::quad::gauss_legendre_on;
use fluctua_core::field::FluctuationField;
use fluctua_core::stats::Accumulator;
use fluctua_core::testfn::TestFunction;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// A complex Monte Carlo estimate with per-component standard errors.
#[derive(Debug, Clone, Copy)]
pub struct ComplexEstimate {
    pub re: f64,
    pub im: f64,
    pub se_re: f64,
    pub se_im: f64,
    pub n: u64,
}

impl ComplexEstimate {
    pub fn zero() -> Self {
        ComplexEstimate {
            re: 0.0,
            im: 0.0,
            se_re: 0.0,
            se_im: 0.0,
            n: 0,
        }
    }

    fn from_accumulators(re: &Accumulator, im: &Accumulator) -> Self {
        ComplexEstimate {
            re: re.mean(),
            im: im.mean(),
            se_re: re.se(),
            se_im: im.se(),
            n: re.count(),
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Root-sum-square of the two component standard errors.
    pub fn combined_se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }

    /// Sum of two estimates from independent sample sets.
    pub fn add_independent(&self, other: &Self) -> Self {
        ComplexEstimate {
            re: self.re + other.re,
            im: self.im + other.im,
            se_re: self.se_re.hypot(other.se_re),
            se_im: self.se_im.hypot(other.se_im),
            n: self.n + other.n,
        }
    }

    /// Multiplication by `i/2`, with the standard errors carried along.
    fn times_i_half(&self) -> Self {
        ComplexEstimate {
            re: -0.5 * self.im,
            im: 0.5 * self.re,
            se_re: 0.5 * self.se_im,
            se_im: 0.5 * self.se_re,
            n: self.n,
        }
    }
}

/// Monte Carlo estimate of the single-interface identity, exposed with its
/// drift (`ic⟨u,φ''⟩`) and mass (`−(σ²/2)‖φ‖²`) parts separated.  The parts
/// carry opposite real means that cancel in `total` under invariance.
#[derive(Debug, Clone, Copy)]
pub struct SigmaEvaluation {
    pub total: ComplexEstimate,
    pub drift: ComplexEstimate,
    pub mass: ComplexEstimate,
}

/// Estimate `∫F(u)·ψφ(u)·(ic⟨u,φ''⟩ − (σ²/2)‖φ‖²) dm(u)` over `samples`
/// independent draws of the scaled-bridge law on a uniform grid.
pub fn sigma_limit_zrp<F, R>(
    statistic: F,
    phi: &TestFunction,
    c: f64,
    sigma: f64,
    grid: usize,
    samples: u64,
    rng: &mut R,
) -> Result<SigmaEvaluation, OracleError>
where
    F: Fn(&FluctuationField) -> f64,
    R: Rng + ?Sized,
{
    if grid < 8 {
        return Err(OracleError::GridTooCoarse(grid));
    }
    if samples < 2 {
        return Err(OracleError::BadParameter(format!(
            "need at least two samples, got {samples}"
        )));
    }
    let law = BridgeLaw::new(c, sigma, grid)?;
    let w_phi = phi.hat_weights(grid)?;
    let w_d2 = phi.hat_weights_d2(grid)?;
    let lf = grid as f64;
    let half_mass = 0.5 * sigma * sigma * phi.l2_norm_sq();

    let mut acc: [[Accumulator; 2]; 3] =
        std::array::from_fn(|_| [Accumulator::new(), Accumulator::new()]);
    for _ in 0..samples {
        let u = law.sample(rng);
        let y = dot(u.values(), &w_phi) / lf;
        let x = dot(u.values(), &w_d2) / lf;
        let fu = statistic(&u);
        let psi = Complex64::new(0.0, y).exp();
        let drift = fu * psi * Complex64::new(0.0, c * x);
        let mass = fu * psi * Complex64::new(-half_mass, 0.0);
        let total = drift + mass;
        for (slot, z) in [(0, total), (1, drift), (2, mass)] {
            acc[slot][0].push(z.re);
            acc[slot][1].push(z.im);
        }
    }
    Ok(SigmaEvaluation {
        total: ComplexEstimate::from_accumulators(&acc[0][0], &acc[0][1]),
        drift: ComplexEstimate::from_accumulators(&acc[1][0], &acc[1][1]),
        mass: ComplexEstimate::from_accumulators(&acc[2][0], &acc[2][1]),
    })
}

/// Closed-form value of the single-interface identity for `F ≡ 1` on the
/// same uniform grid the Monte Carlo routine uses (so the two agree without
/// any discretization gap).  Everything is real: with jointly Gaussian
/// `Y = ⟨u,φ⟩` and `X = ⟨u,φ''⟩`, `E[X e^{iY}] = i·Cov(X,Y)·e^{−Var(Y)/2}`.
#[derive(Debug, Clone, Copy)]
pub struct SigmaReference {
    pub total: f64,
    pub drift: f64,
    pub mass: f64,
    /// `E[ψφ] = exp(−Var⟨u,φ⟩/2)`.
    pub characteristic: f64,
}

pub fn sigma_zrp_gaussian_reference(
    phi: &TestFunction,
    c: f64,
    sigma: f64,
    grid: usize,
) -> Result<SigmaReference, OracleError> {
    if grid < 8 {
        return Err(OracleError::GridTooCoarse(grid));
    }
    let law = BridgeLaw::new(c, sigma, grid)?;
    let scale_sq = law.scale() * law.scale();
    let w_phi = phi.hat_weights(grid)?;
    let w_d2 = phi.hat_weights_d2(grid)?;
    let lf = grid as f64;
    let mut var_y = 0.0;
    let mut cov_xy = 0.0;
    for j in 0..=grid {
        let tj = j as f64 / lf;
        for k in 0..=grid {
            let tk = k as f64 / lf;
            let kernel = scale_sq * (tj.min(tk) - tj * tk);
            var_y += (w_phi[j] / lf) * (w_phi[k] / lf) * kernel;
            cov_xy += (w_d2[j] / lf) * (w_phi[k] / lf) * kernel;
        }
    }
    let characteristic = (-0.5 * var_y).exp();
    let drift = -c * cov_xy * characteristic;
    let mass = -0.5 * sigma * sigma * phi.l2_norm_sq() * characteristic;
    Ok(SigmaReference {
        total: drift + mass,
        drift,
        mass,
        characteristic,
    })
}

/// Contact-density prefactor `(2πr³(1−r)³)^{-1/2}` of the boundary term.
pub fn boundary_prefactor(r: f64) -> Result<f64, OracleError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(OracleError::BadParameter(format!(
            "prefactor argument must lie strictly inside (0,1), got {r}"
        )));
    }
    Ok(1.0 / (2.0 * PI * (r * (1.0 - r)).powi(3)).sqrt())
}

/// Gauss–Legendre evaluation of `∫_{s0}^{s1} g(r)·(2πr³(1−r)³)^{-1/2} dr`.
/// The interval must stay strictly inside `(0,1)`: the prefactor is not
/// integrable at the endpoints, so integrands must vanish near them.
pub fn boundary_quadrature<G: Fn(f64) -> f64>(
    g: G,
    s0: f64,
    s1: f64,
    n_nodes: usize,
) -> Result<f64, OracleError> {
    if !(s0 > 0.0 && s1 < 1.0 && s0 < s1) {
        return Err(OracleError::SingularEndpoint(s0, s1));
    }
    let (nodes, weights) = gauss_legendre_on(s0, s1, n_nodes)?;
    let mut total = 0.0;
    for (&r, &w) in nodes.iter().zip(&weights) {
        total += w * boundary_prefactor(r)? * g(r);
    }
    Ok(total)
}

/// Rotate a (bridge, excursion) draw into the ordered pair
/// `v = (S+D)/√2 ≥ w = (S−D)/√2`.
pub fn rotate_to_pair(
    s: &FluctuationField,
    d: &FluctuationField,
) -> (FluctuationField, FluctuationField) {
    let v: Vec<f64> = s
        .values()
        .iter()
        .zip(d.values())
        .map(|(a, b)| FRAC_1_SQRT_2 * (a + b))
        .collect();
    let w: Vec<f64> = s
        .values()
        .iter()
        .zip(d.values())
        .map(|(a, b)| FRAC_1_SQRT_2 * (a - b))
        .collect();
    (
        FluctuationField::new(v).expect("finite by construction"),
        FluctuationField::new(w).expect("finite by construction"),
    )
}

#[derive(Debug, Clone, Copy)]
pub struct PairSigmaConfig {
    /// Uniform grid resolution for the sampled paths.
    pub grid: usize,
    /// Monte Carlo draws for the absolutely continuous bulk term.
    pub bulk_samples: u64,
    /// Monte Carlo draws per quadrature node for the boundary term.
    pub node_samples: u64,
    /// Gauss–Legendre nodes on the support of `φv − φw`.
    pub quad_nodes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct PairSigmaEvaluation {
    pub total: ComplexEstimate,
    pub bulk: ComplexEstimate,
    pub boundary: ComplexEstimate,
}

/// Estimate the two-sided identity `∫F·ψφ dΣ` for the ordered pair:
/// the bulk expectation over (bridge, excursion) draws plus the pinned
/// boundary term.  When `φv ≡ φw` the boundary vanishes identically and is
/// skipped; otherwise the support of `φv − φw` must stay strictly inside
/// `(0,1)` and coarse grids that cannot pin inside it are rejected.
pub fn sigma_limit_pair<F, R>(
    statistic: F,
    phi_v: &TestFunction,
    phi_w: &TestFunction,
    cfg: &PairSigmaConfig,
    rng: &mut R,
) -> Result<PairSigmaEvaluation, OracleError>
where
    F: Fn(&FluctuationField, &FluctuationField) -> f64,
    R: Rng + ?Sized,
{
    if cfg.grid < 16 {
        return Err(OracleError::GridTooCoarse(cfg.grid));
    }
    if cfg.bulk_samples < 2 || cfg.node_samples < 2 || cfg.quad_nodes == 0 {
        return Err(OracleError::BadParameter(
            "pair evaluation needs at least two samples per term and one quadrature node".into(),
        ));
    }
    let grid = cfg.grid;
    let lf = grid as f64;
    let w_v = phi_v.hat_weights(grid)?;
    let w_v2 = phi_v.hat_weights_d2(grid)?;
    let w_w = phi_w.hat_weights(grid)?;
    let w_w2 = phi_w.hat_weights_d2(grid)?;
    let half_mass = 0.5 * (phi_v.l2_norm_sq() + phi_w.l2_norm_sq());
    let law = BridgeLaw::standard(grid)?;

    // Bulk: expectation of F·ψ·½(i⟨v,φv''⟩ + i⟨w,φw''⟩ − ‖φv‖² − ‖φw‖²).
    let mut bulk_re = Accumulator::new();
    let mut bulk_im = Accumulator::new();
    for _ in 0..cfg.bulk_samples {
        let s = law.sample(rng);
        let d = sample_excursion(grid, rng)?;
        let (v, w) = rotate_to_pair(&s, &d);
        let y = dot(v.values(), &w_v) / lf + dot(w.values(), &w_w) / lf;
        let a2 = dot(v.values(), &w_v2) / lf + dot(w.values(), &w_w2) / lf;
        let fu = statistic(&v, &w);
        let z = fu * Complex64::new(0.0, y).exp() * Complex64::new(-half_mass, 0.5 * a2);
        bulk_re.push(z.re);
        bulk_im.push(z.im);
    }
    let bulk = ComplexEstimate::from_accumulators(&bulk_re, &bulk_im);

    let boundary = match difference_support(phi_v, phi_w)? {
        None => ComplexEstimate::zero(),
        Some((s0, s1)) => {
            let (nodes, weights) = gauss_legendre_on(s0, s1, cfg.quad_nodes)?;
            let mut raw = ComplexEstimate::zero();
            let mut var_re = 0.0;
            let mut var_im = 0.0;
            for (&r, &quad_w) in nodes.iter().zip(&weights) {
                let phi_d = FRAC_1_SQRT_2 * (phi_v.eval(r) - phi_w.eval(r));
                let coeff = quad_w * boundary_prefactor(r)? * phi_d;
                if coeff == 0.0 {
                    continue;
                }
                // Pin at the grid node nearest the quadrature node; the
                // prefactor and φD are still evaluated at the true node.
                let k = (r * lf).round() as usize;
                if k < 3 || k + 3 > grid {
                    return Err(OracleError::GridTooCoarse(grid));
                }
                let pin = k as f64 / lf;
                let mut node_re = Accumulator::new();
                let mut node_im = Accumulator::new();
                for _ in 0..cfg.node_samples {
                    let s = law.sample(rng);
                    let d = sample_conditioned_excursion(grid, pin, rng)?;
                    let (v, w) = rotate_to_pair(&s, &d);
                    let y = dot(v.values(), &w_v) / lf + dot(w.values(), &w_w) / lf;
                    let fu = statistic(&v, &w);
                    let z = fu * Complex64::new(0.0, y).exp();
                    node_re.push(z.re);
                    node_im.push(z.im);
                }
                raw.re += coeff * node_re.mean();
                raw.im += coeff * node_im.mean();
                var_re += (coeff * node_re.se()).powi(2);
                var_im += (coeff * node_im.se()).powi(2);
                raw.n += cfg.node_samples;
            }
            raw.se_re = var_re.sqrt();
            raw.se_im = var_im.sqrt();
            raw.times_i_half()
        }
    };

    Ok(PairSigmaEvaluation {
        total: bulk.add_independent(&boundary),
        bulk,
        boundary,
    })
}

/// Numerical support of `φv − φw`, expanded by one probe cell.  `None` when
/// the difference vanishes identically; an error when the support reaches
/// the ends of `[0,1]`, where the boundary prefactor is not integrable.
fn difference_support(
    phi_v: &TestFunction,
    phi_w: &TestFunction,
) -> Result<Option<(f64, f64)>, OracleError> {
    const PROBES: usize = 1024;
    let mut max_abs = 0.0f64;
    let mut diffs = Vec::with_capacity(PROBES + 1);
    for i in 0..=PROBES {
        let x = i as f64 / PROBES as f64;
        let (fv, fw) = (phi_v.eval(x), phi_w.eval(x));
        max_abs = max_abs.max(fv.abs()).max(fw.abs());
        diffs.push(fv - fw);
    }
    let tol = 1e-12 * (1.0 + max_abs);
    let first = diffs.iter().position(|d| d.abs() > tol);
    let Some(first) = first else {
        return Ok(None);
    };
    let last = diffs.iter().rposition(|d| d.abs() > tol).unwrap();
    let s0 = (first.saturating_sub(1)) as f64 / PROBES as f64;
    let s1 = ((last + 1).min(PROBES)) as f64 / PROBES as f64;
    if first <= 1 || last >= PROBES - 1 {
        return Err(OracleError::SingularEndpoint(s0, s1));
    }
    Ok(Some((s0, s1)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
