//! Exact samplers for the canonical invariant measure.
//!
//! The invariant law of the process conditioned on the particle number is the
//! product of single-site laws `ν_a` conditioned on `Σ n(i) = ⌊N·n̄⌋`.  The
//! conditioning wipes out the fugacity, so any `a` below the radius produces
//! the same conditional law — a fact the tests probe directly.
//!
//! Two exact samplers are provided:
//!
//! - [`sample_invariant`] draws the product law and rejects until the total
//!   matches.  Acceptance odds are `P(Σ = M) ≍ (2π N α)^{-1/2}`, so this is
//!   the cheap choice at moderate `N`.
//! - [`CanonicalSampler`] precomputes the partial-sum distributions and draws
//!   the sites sequentially from their exact conditional laws — deterministic
//!   cost, preferable when the rejection odds get thin.

use crate::error::ZrpError;
use crate::law::GrandCanonicalLaw;
use fluctua_core::occupation::{target_particles, OccupationVector};
use rand::Rng;

/// Safety budget for the rejection loop (far above any sane expected count).
const MAX_REJECTION_TRIES: u64 = 100_000_000;

/// Draws an occupation vector from the canonical law by rejection.
pub fn sample_invariant<R: Rng + ?Sized>(
    law: &GrandCanonicalLaw,
    n_sites: usize,
    density: f64,
    rng: &mut R,
) -> Result<OccupationVector, ZrpError> {
    let total = target_particles(n_sites, density);
    let max_per_site = (law.support_len() - 1) as u64;
    if total > max_per_site * n_sites as u64 {
        return Err(ZrpError::InfeasibleTotal { n_sites, total });
    }
    let mut counts = vec![0u32; n_sites];
    for _ in 0..MAX_REJECTION_TRIES {
        let mut sum = 0u64;
        let mut abandoned = false;
        for c in counts.iter_mut() {
            let k = law.sample(rng);
            sum += k;
            if sum > total {
                abandoned = true;
                break;
            }
            *c = k as u32;
        }
        if !abandoned && sum == total {
            let occ = OccupationVector::new(counts, density)?;
            return Ok(occ);
        }
    }
    Err(ZrpError::RejectionBudget(MAX_REJECTION_TRIES))
}

/// Sequential-conditional sampler for the canonical law.
///
/// Precomputes `P_k(s) = P(n(1) + … + n(k) = s)` for the tabulated site law,
/// then draws each site from `P(n(k) = m | remaining total)` by inversion.
#[derive(Debug, Clone)]
pub struct CanonicalSampler {
    n_sites: usize,
    density: f64,
    total: u64,
    pmf: Vec<f64>,
    /// `partial[k-1][s] = P_k(s)` for `k = 1, …, n_sites`, `s = 0, …, total`.
    partial: Vec<Vec<f64>>,
}

impl CanonicalSampler {
    pub fn new(
        law: &GrandCanonicalLaw,
        n_sites: usize,
        density: f64,
    ) -> Result<Self, ZrpError> {
        let total = target_particles(n_sites, density);
        let width = total as usize + 1;
        let pmf: Vec<f64> = (0..law.support_len() as u64)
            .map(|k| law.pmf(k))
            .collect();
        let mut partial = Vec::with_capacity(n_sites);
        let mut first = vec![0.0; width];
        for (m, &p) in pmf.iter().enumerate().take(width) {
            first[m] = p;
        }
        partial.push(first);
        for _ in 1..n_sites {
            let prev = partial.last().expect("non-empty");
            let mut next = vec![0.0; width];
            for (s, slot) in next.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (m, &p) in pmf.iter().enumerate().take(s + 1) {
                    acc += p * prev[s - m];
                }
                *slot = acc;
            }
            partial.push(next);
        }
        if partial[n_sites - 1][total as usize] <= 0.0 {
            return Err(ZrpError::InfeasibleTotal { n_sites, total });
        }
        Ok(CanonicalSampler {
            n_sites,
            density,
            total,
            pmf,
            partial,
        })
    }

    /// Draws one occupation vector; cost is `O(N · support)` per draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> OccupationVector {
        let mut counts = vec![0u32; self.n_sites];
        let mut remaining = self.total as usize;
        // Fill sites N, N−1, …, 2; site 1 takes the remainder.
        for i in (1..self.n_sites).rev() {
            let norm = self.partial[i][remaining];
            let u: f64 = rng.gen::<f64>() * norm;
            let mut acc = 0.0;
            let mut chosen = remaining;
            for (m, &p) in self.pmf.iter().enumerate().take(remaining + 1) {
                acc += p * self.partial[i - 1][remaining - m];
                if acc > u {
                    chosen = m;
                    break;
                }
            }
            // Rounding may leave u marginally above the final cumulative; the
            // fallback keeps the draw in the feasible range.
            let chosen = chosen.min(remaining);
            counts[i] = chosen as u32;
            remaining -= chosen;
        }
        counts[0] = remaining as u32;
        OccupationVector::new(counts, self.density).expect("total preserved by construction")
    }

    /// Exact probability of a given occupation vector under the canonical law.
    pub fn state_probability(&self, counts: &[u32]) -> f64 {
        assert_eq!(counts.len(), self.n_sites, "site count mismatch");
        let total: u64 = counts.iter().map(|&c| c as u64).sum();
        if total != self.total {
            return 0.0;
        }
        let mut p = 1.0;
        for &c in counts {
            p *= self.pmf.get(c as usize).copied().unwrap_or(0.0);
        }
        p / self.partial[self.n_sites - 1][self.total as usize]
    }
}
