//! Grand-canonical single-site laws and the fugacity ↔ density dictionary.
//!
//! For a fugacity `a` the single-site law is
//!
//! ```text
//! ν_a(k) = a^k / (Z(a) · τ(1)·τ(2)⋯τ(k)),        Z(a) = Σ_k a^k / Π_{j≤k} τ(j),
//! ```
//!
//! defined for `a` below the radius `a* = sup{a : Z(a) < ∞}`.  The mean
//! `R(a) = E_{ν_a}[n]` is strictly increasing, and its inverse `Φ` maps a
//! target density to the matching fugacity.  The law also carries the four
//! moments that control the fluctuation fields:
//!
//! - `tau_bar = E[τ(n)]`, `rho = Cov(n, τ(n))` — both equal `a` exactly,
//! - `alpha = Var(n)`, `gamma = Var(τ(n))`.

use crate::error::ZrpError;
use crate::rate::RateFunction;
use rand::Rng;

/// Default relative bound on the neglected tail mass of the pmf table.
pub const DEFAULT_TAIL_TOL: f64 = 1e-14;

/// Hard cap on the pmf table length (reached only near the convergence radius).
const MAX_TERMS: usize = 4_000_000;

/// Absolute tolerance on `|R(Φ(n̄)) − n̄|` in the fugacity solve.
pub const PHI_TOL: f64 = 1e-10;

/// Moments of a single-site law that enter the fluctuation limits.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    /// `E[n]` — the density `R(a)`.
    pub mean: f64,
    /// `E[τ(n)]`; equals the fugacity exactly.
    pub tau_bar: f64,
    /// `Var(n)` — static compressibility of the occupation variable.
    pub alpha: f64,
    /// `Cov(n, τ(n))`; equals the fugacity exactly.
    pub rho: f64,
    /// `Var(τ(n))`.
    pub gamma: f64,
}

/// A grand-canonical single-site law `ν_a`, tabulated to a controlled tail.
#[derive(Debug, Clone)]
pub struct GrandCanonicalLaw {
    a: f64,
    z: f64,
    pmf: Vec<f64>,
    cdf: Vec<f64>,
    tail_bound: f64,
    moments: Moments,
}

/// Tabulates `ν_a` for the given rate function.
///
/// Fails if `a ≤ 0`, or if `a` is at or beyond the convergence radius (for a
/// bounded rate this means `a ≥ sup τ`).  The neglected tail mass is bounded
/// by `tail_tol` relative to the full normalization.
pub fn build_nu(
    rate: &RateFunction,
    a: f64,
    tail_tol: f64,
) -> Result<GrandCanonicalLaw, ZrpError> {
    if !a.is_finite() || a <= 0.0 {
        return Err(ZrpError::FugacityOutOfRange {
            a,
            reason: "fugacity must be positive and finite".into(),
        });
    }
    if let Some(sup) = rate.sup() {
        if a >= sup {
            return Err(ZrpError::FugacityOutOfRange {
                a,
                reason: format!("radius of convergence is sup τ = {sup} for a bounded rate"),
            });
        }
    }

    let mut terms = vec![1.0_f64];
    let mut z = 1.0_f64;
    let mut term = 1.0_f64;
    loop {
        let k = terms.len() as u64;
        let ratio = a / rate.tau(k);
        term *= ratio;
        if !term.is_finite() {
            return Err(ZrpError::FugacityOutOfRange {
                a,
                reason: "partition terms overflow; fugacity too close to the radius".into(),
            });
        }
        terms.push(term);
        z += term;
        // τ is non-decreasing, so every later ratio is ≤ the next one and the
        // remaining tail is dominated by a geometric series.
        let next_ratio = a / rate.tau(k + 1);
        if next_ratio < 1.0 {
            let tail = term * next_ratio / (1.0 - next_ratio);
            if tail <= tail_tol * z {
                let tail_bound = tail / z;
                return Ok(finish(rate, a, z, terms, tail_bound));
            }
        }
        if terms.len() >= MAX_TERMS {
            return Err(ZrpError::FugacityOutOfRange {
                a,
                reason: format!("no geometric tail after {MAX_TERMS} terms"),
            });
        }
    }
}

fn finish(
    rate: &RateFunction,
    a: f64,
    z: f64,
    terms: Vec<f64>,
    tail_bound: f64,
) -> GrandCanonicalLaw {
    let pmf: Vec<f64> = terms.iter().map(|t| t / z).collect();
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for &p in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut tau_bar = 0.0;
    let mut cross = 0.0;
    let mut tau2 = 0.0;
    for (k, &p) in pmf.iter().enumerate() {
        let kf = k as f64;
        let t = rate.tau(k as u64);
        mean += kf * p;
        m2 += kf * kf * p;
        tau_bar += t * p;
        cross += kf * t * p;
        tau2 += t * t * p;
    }
    let moments = Moments {
        mean,
        tau_bar,
        alpha: m2 - mean * mean,
        rho: cross - mean * tau_bar,
        gamma: tau2 - tau_bar * tau_bar,
    };
    GrandCanonicalLaw {
        a,
        z,
        pmf,
        cdf,
        tail_bound,
        moments,
    }
}

/// Solves `R(a) = n̄` for the fugacity by bisection, to within [`PHI_TOL`].
pub fn phi_of(rate: &RateFunction, n_bar: f64, tail_tol: f64) -> Result<f64, ZrpError> {
    if !n_bar.is_finite() || n_bar <= 0.0 {
        return Err(ZrpError::DensityOutOfRange(n_bar));
    }
    // The mean R is strictly increasing in a with R(0+) = 0, and R(a) → ∞ as
    // a approaches the radius (bounded rates give geometric-type tails whose
    // mean blows up), so a bracket always exists.
    let mut lo = 0.0_f64;
    let mut hi = match rate.sup() {
        Some(sup) => 0.5 * sup,
        None => rate.tau(1).min(1.0),
    };
    let mut hi_mean = build_nu(rate, hi, tail_tol)?.moments().mean;
    let mut grow_steps = 0;
    while hi_mean < n_bar {
        let next = match rate.sup() {
            Some(sup) => 0.5 * (hi + sup),
            None => hi * 2.0,
        };
        lo = hi;
        hi = next;
        hi_mean = build_nu(rate, hi, tail_tol)?.moments().mean;
        grow_steps += 1;
        if grow_steps > 300 {
            return Err(ZrpError::DensityOutOfRange(n_bar));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mean = build_nu(rate, mid, tail_tol)?.moments().mean;
        if (mean - n_bar).abs() <= PHI_TOL {
            return Ok(mid);
        }
        if mean < n_bar {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl GrandCanonicalLaw {
    /// Convenience: the law at the fugacity matching a target density.
    pub fn at_density(rate: &RateFunction, n_bar: f64) -> Result<Self, ZrpError> {
        let a = phi_of(rate, n_bar, DEFAULT_TAIL_TOL)?;
        build_nu(rate, a, DEFAULT_TAIL_TOL)
    }

    pub fn fugacity(&self) -> f64 {
        self.a
    }

    /// The normalization `Z(a)` (partial sum; tail below the build tolerance).
    pub fn z(&self) -> f64 {
        self.z
    }

    /// `ν_a(k)`, zero beyond the tabulated range.
    pub fn pmf(&self, k: u64) -> f64 {
        self.pmf.get(k as usize).copied().unwrap_or(0.0)
    }

    /// Length of the tabulated support `{0, …, len − 1}`.
    pub fn support_len(&self) -> usize {
        self.pmf.len()
    }

    /// Relative bound on the neglected tail mass.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }

    /// Draws one occupation number by inversion on the tabulated cdf.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.gen();
        // partition_point returns the count of cdf entries < u, i.e. the
        // smallest k with cdf[k] ≥ u; saturate into the table on the 1e-14
        // tail the table does not carry.
        let idx = self.cdf.partition_point(|&c| c < u);
        idx.min(self.pmf.len() - 1) as u64
    }
}
