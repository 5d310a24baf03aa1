//! Event-driven simulation of the zero-range process on `{1, …, N}`.
//!
//! A site holding `k` particles expels one at rate `(N²/2)·τ(k)` toward each
//! admissible neighbour: both neighbours in the interior, only the inward one
//! at the two ends (no particle ever leaves the segment).  The `N²` factor
//! runs the chain in diffusive time units, so fluctuation fields decorrelate
//! on time scales of order one.
//!
//! The engine keeps one weight `τ(n(i))·d(i)` per site (`d` = number of
//! admissible directions) in a Fenwick tree, giving `O(log N)` cost per jump.

use crate::error::ZrpError;
use crate::rate::RateFunction;
use fluctua_core::fenwick::WeightedIndex;
use fluctua_core::field::FluctuationField;
use fluctua_core::occupation::OccupationVector;
use rand::Rng;

/// One particle jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Jump {
    /// Departure site, 0-based.
    pub from: usize,
    /// Arrival site, 0-based.
    pub to: usize,
}

/// Event-driven zero-range dynamics.
#[derive(Debug, Clone)]
pub struct ZrpDynamics {
    rate: RateFunction,
    counts: Vec<u32>,
    density: f64,
    weights: WeightedIndex,
    total_particles: u64,
    time: f64,
    events: u64,
}

/// Number of admissible jump directions from a site.
fn directions(i: usize, n_sites: usize) -> f64 {
    if n_sites == 1 {
        0.0
    } else if i == 0 || i == n_sites - 1 {
        1.0
    } else {
        2.0
    }
}

impl ZrpDynamics {
    pub fn new(initial: OccupationVector, rate: RateFunction) -> Self {
        let counts = initial.counts().to_vec();
        let n = counts.len();
        let w: Vec<f64> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| rate.tau(c as u64) * directions(i, n))
            .collect();
        ZrpDynamics {
            weights: WeightedIndex::from_weights(w),
            total_particles: initial.total(),
            density: initial.density(),
            counts,
            rate,
            time: 0.0,
            events: 0,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.counts.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Total jump rate `(N²/2)·Σ_i τ(n(i))·d(i)` in diffusive units.
    pub fn total_rate(&self) -> f64 {
        let n = self.n_sites() as f64;
        0.5 * n * n * self.weights.total()
    }

    /// Executes one jump and advances the exponential clock.
    ///
    /// Returns `None` from an absorbing (all-empty) state, where the clock
    /// never rings.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Jump> {
        let total = self.total_rate();
        if total <= 0.0 {
            return None;
        }
        let dt = -(1.0 - rng.gen::<f64>()).ln();
        self.time += dt / total;
        let jump = self.fire(rng);
        self.events += 1;
        Some(jump)
    }

    fn fire<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Jump {
        let n = self.n_sites();
        let from = self
            .weights
            .sample(rng)
            .expect("positive total rate implies a positive weight");
        let to = if from == 0 {
            1
        } else if from == n - 1 {
            n - 2
        } else if rng.gen::<bool>() {
            from + 1
        } else {
            from - 1
        };
        self.apply(Jump { from, to });
        jump_audit(self);
        Jump { from, to }
    }

    fn apply(&mut self, jump: Jump) {
        debug_assert!(self.counts[jump.from] > 0, "jump out of an empty site");
        self.counts[jump.from] -= 1;
        self.counts[jump.to] += 1;
        let n = self.n_sites();
        for i in [jump.from, jump.to] {
            self.weights
                .set(i, self.rate.tau(self.counts[i] as u64) * directions(i, n));
        }
    }

    /// Runs until `time + duration`; the final waiting interval is discarded,
    /// which is exact for an exponential clock.  Returns the number of jumps.
    pub fn run_for<R: Rng + ?Sized>(&mut self, duration: f64, rng: &mut R) -> u64 {
        let deadline = self.time + duration;
        let mut fired = 0u64;
        loop {
            let total = self.total_rate();
            if total <= 0.0 {
                break;
            }
            let dt = -(1.0 - rng.gen::<f64>()).ln();
            let dt = dt / total;
            if self.time + dt > deadline {
                break;
            }
            self.time += dt;
            self.fire(rng);
            self.events += 1;
            fired += 1;
        }
        self.time = deadline;
        fired
    }

    /// Snapshot as a validated occupation vector.
    pub fn occupation(&self) -> OccupationVector {
        OccupationVector::new(self.counts.clone(), self.density)
            .expect("particle number is conserved")
    }

    /// Consistency audit: conserved particle number and weights matching the
    /// occupation state.
    pub fn validate(&self) -> Result<(), ZrpError> {
        let total: u64 = self.counts.iter().map(|&c| c as u64).sum();
        if total != self.total_particles {
            return Err(ZrpError::MismatchedReplicas(format!(
                "particle number drifted: {total} vs {}",
                self.total_particles
            )));
        }
        let n = self.n_sites();
        for (i, &c) in self.counts.iter().enumerate() {
            let want = self.rate.tau(c as u64) * directions(i, n);
            if (self.weights.get(i) - want).abs() > 1e-9 * (1.0 + want) {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "weight table desynchronized at site {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Periodic full-state audit under debug assertions; per-event checks stay
/// O(1) so assertion-enabled test runs keep their event throughput.
fn jump_audit(dyn_: &ZrpDynamics) {
    if cfg!(debug_assertions) && dyn_.events % (1 << 18) == 0 {
        dyn_.validate().expect("audit");
    }
}

/// Centred current field `q(j/N) = N^{-1/2} Σ_{k≤j} (τ(n(k)) − τ̄)`.
///
/// `tau_bar` is the grand-canonical mean of `τ(n)` at the matching fugacity;
/// for the linear rate it equals the density and `q` coincides with the
/// height field.
pub fn q_field(occ: &OccupationVector, rate: &RateFunction, tau_bar: f64) -> FluctuationField {
    let n = occ.sites();
    let s = 1.0 / (n as f64).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    values.push(0.0);
    for &c in occ.counts() {
        acc += rate.tau(c as u64) - tau_bar;
        values.push(acc * s);
    }
    FluctuationField::new(values).expect("finite by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::CanonicalSampler;
    use crate::law::{build_nu, DEFAULT_TAIL_TOL};
    use approx::assert_abs_diff_eq;
    use fluctua_core::rng::stream;
    use fluctua_core::stats::chi_square_gof;

    #[test]
    fn two_site_total_rate() {
        // N = 2, occupations (1, 1), linear rate: each site pushes inward at
        // (N²/2)·τ(1) = 2, so the total rate is 4.
        let occ = OccupationVector::new(vec![1, 1], 1.0).unwrap();
        let d = ZrpDynamics::new(occ, RateFunction::linear());
        assert_abs_diff_eq!(d.total_rate(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_state_is_absorbing() {
        let occ = OccupationVector::new(vec![0, 0, 0], 0.1).unwrap();
        let mut d = ZrpDynamics::new(occ, RateFunction::linear());
        let mut rng = stream(3, "zrp-empty", 0);
        assert_eq!(d.step(&mut rng), None);
        let fired = d.run_for(2.0, &mut rng);
        assert_eq!(fired, 0);
        assert_abs_diff_eq!(d.time(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn boundary_jumps_stay_inside() {
        let occ = OccupationVector::new(vec![3, 0, 0, 0], 0.75).unwrap();
        let mut d = ZrpDynamics::new(occ, RateFunction::linear());
        let mut rng = stream(4, "zrp-boundary", 0);
        for _ in 0..2_000 {
            if let Some(j) = d.step(&mut rng) {
                assert!(j.to < 4, "jump left the segment");
                assert!((j.from as i64 - j.to as i64).abs() == 1);
            }
        }
        d.validate().expect("clean state");
        assert_eq!(d.occupation().total(), 3);
    }

    #[test]
    fn canonical_law_is_stationary() {
        // Start from the canonical law on N = 3, n̄ = 1, run to t = 0.5, and
        // check the state law is unchanged (chi-square over all 10 states).
        let rate = RateFunction::linear();
        let law = build_nu(&rate, 1.0, DEFAULT_TAIL_TOL).expect("fine");
        let sampler = CanonicalSampler::new(&law, 3, 1.0).expect("feasible");
        let mut states = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=(3 - a) {
                states.push(vec![a, b, 3 - a - b]);
            }
        }
        let probs: Vec<f64> = states.iter().map(|s| sampler.state_probability(s)).collect();
        let mut rng = stream(9, "zrp-stationary", 0);
        let reps = 4_000usize;
        let mut counts = vec![0u64; states.len()];
        for _ in 0..reps {
            let start = sampler.sample(&mut rng);
            let mut d = ZrpDynamics::new(start, rate.clone());
            d.run_for(0.5, &mut rng);
            let idx = states
                .iter()
                .position(|s| s.as_slice() == d.counts())
                .expect("state enumerated");
            counts[idx] += 1;
        }
        let report = chi_square_gof(&counts, &probs).expect("well-posed");
        assert!(report.p_value > 0.01, "p = {}", report.p_value);
    }

    #[test]
    fn q_field_matches_height_field_for_linear_rate() {
        let occ = OccupationVector::new(vec![2, 0, 1, 3, 0, 0, 1, 1], 1.0).unwrap();
        let q = q_field(&occ, &RateFunction::linear(), 1.0);
        let u = occ.height_field();
        for j in 0..=8 {
            let x = j as f64 / 8.0;
            assert_abs_diff_eq!(q.eval(x), u.eval(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn q_field_indicator_example() {
        // τ = 1_{k≥1}, τ̄ = 1/2, N = 4, occupations (2,0,1,1):
        // partial sums of (τ(n)−τ̄): 1/2, 0, 1/2, 1 → scaled by 1/2.
        let occ = OccupationVector::new(vec![2, 0, 1, 1], 1.0).unwrap();
        let q = q_field(&occ, &RateFunction::indicator(), 0.5);
        assert_abs_diff_eq!(q.eval(0.25), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(q.eval(0.5), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(q.eval(0.75), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(q.eval(1.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn long_run_keeps_invariants() {
        let rate = RateFunction::from_table(
            vec![0.0, 1.0, 1.5],
            crate::rate::Growth::Linear { slope: 0.25 },
        )
        .expect("valid");
        let occ = OccupationVector::new(vec![1, 4, 0, 0, 2, 1, 0, 0], 1.0).unwrap();
        let mut d = ZrpDynamics::new(occ, rate);
        let mut rng = stream(10, "zrp-long", 0);
        d.run_for(3.0, &mut rng);
        assert!(d.events() > 100, "dynamics should be active");
        d.validate().expect("clean after long run");
    }
}
