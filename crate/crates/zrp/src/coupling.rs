//! Monotone coupling of zero-range replicas through shared level clocks.
//!
//! Decompose the jump rate over occupation levels: `τ(k) = Σ_{l≤k} (τ(l) −
//! τ(l−1))`, all increments non-negative because `τ` is non-decreasing.
//! Attach one Poisson clock of rate `(N²/2)·(τ(l) − τ(l−1))` to every triple
//! (site, direction, level `l`); when it rings, every replica holding at
//! least `l` particles on that site sends one to the neighbour.  Each replica
//! alone sees its correct marginal rates, and the coupling preserves the
//! *height-function* order: if the partial sums of one replica dominate those
//! of another at time zero they do so forever.
//!
//! The implementation is lazy: it draws one event for the envelope rate
//! `(N²/2)·τ(M(i))·d(i)` with `M(i)` the maximal occupation across replicas,
//! then resolves the level by inverting `l ↦ τ(l)` on `u·τ(M(i))` with a
//! single uniform `u` — equivalent to the full clock family but without ever
//! materializing it.

use crate::error::ZrpError;
use crate::rate::RateFunction;
use fluctua_core::fenwick::WeightedIndex;
use fluctua_core::occupation::OccupationVector;
use rand::Rng;

/// Coupled zero-range replicas driven by one shared noise.
#[derive(Debug, Clone)]
pub struct CoupledZrp {
    rate: RateFunction,
    replicas: Vec<Vec<u32>>,
    /// `heights[r][j] = Σ_{l≤j} n_r(l)` (0-based partial sums).
    heights: Vec<Vec<i64>>,
    /// `(upper, lower)` pairs whose height order is enforced per event.
    dominations: Vec<(usize, usize)>,
    /// `M(i)`: maximal occupation of site `i` over the replicas.
    max_occ: Vec<u32>,
    envelope: WeightedIndex,
    density: f64,
    time: f64,
    events: u64,
}

fn directions(i: usize, n_sites: usize) -> f64 {
    if n_sites == 1 {
        0.0
    } else if i == 0 || i == n_sites - 1 {
        1.0
    } else {
        2.0
    }
}

fn partial_sums(counts: &[u32]) -> Vec<i64> {
    let mut acc = 0i64;
    counts
        .iter()
        .map(|&c| {
            acc += c as i64;
            acc
        })
        .collect()
}

/// Pointwise max/min of two occupation vectors *as height functions*.
///
/// The envelopes are valid occupation vectors with the shared particle
/// number, and they sandwich both inputs in the height order.
pub fn envelope_pair(
    a: &OccupationVector,
    b: &OccupationVector,
) -> Result<(OccupationVector, OccupationVector), ZrpError> {
    if a.sites() != b.sites() || a.total() != b.total() {
        return Err(ZrpError::MismatchedReplicas(format!(
            "{} sites / {} particles vs {} sites / {} particles",
            a.sites(),
            a.total(),
            b.sites(),
            b.total()
        )));
    }
    let sa = partial_sums(a.counts());
    let sb = partial_sums(b.counts());
    let build = |pick: &dyn Fn(i64, i64) -> i64| -> Vec<u32> {
        let mut prev = 0i64;
        (0..sa.len())
            .map(|j| {
                let s = pick(sa[j], sb[j]);
                let c = s - prev;
                prev = s;
                c as u32
            })
            .collect()
    };
    let hi = OccupationVector::new(build(&|x, y| x.max(y)), a.density())?;
    let lo = OccupationVector::new(build(&|x, y| x.min(y)), a.density())?;
    Ok((hi, lo))
}

impl CoupledZrp {
    /// Couples replicas with equal site counts and particle numbers, and
    /// records every height-ordered pair for per-event order enforcement.
    pub fn new(initials: Vec<OccupationVector>, rate: RateFunction) -> Result<Self, ZrpError> {
        let first = initials
            .first()
            .ok_or_else(|| ZrpError::MismatchedReplicas("no replicas".into()))?;
        let n = first.sites();
        let total = first.total();
        for occ in &initials {
            if occ.sites() != n || occ.total() != total {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "all replicas need {n} sites and {total} particles"
                )));
            }
        }
        let replicas: Vec<Vec<u32>> = initials.iter().map(|o| o.counts().to_vec()).collect();
        let heights: Vec<Vec<i64>> = replicas.iter().map(|c| partial_sums(c)).collect();
        let mut dominations = Vec::new();
        for a in 0..replicas.len() {
            for b in 0..replicas.len() {
                if a != b && heights[a].iter().zip(&heights[b]).all(|(x, y)| x >= y) {
                    dominations.push((a, b));
                }
            }
        }
        let max_occ: Vec<u32> = (0..n)
            .map(|i| replicas.iter().map(|r| r[i]).max().expect("non-empty"))
            .collect();
        let weights: Vec<f64> = max_occ
            .iter()
            .enumerate()
            .map(|(i, &m)| rate.tau(m as u64) * directions(i, n))
            .collect();
        Ok(CoupledZrp {
            envelope: WeightedIndex::from_weights(weights),
            density: first.density(),
            rate,
            replicas,
            heights,
            dominations,
            max_occ,
            time: 0.0,
            events: 0,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.max_occ.len()
    }

    pub fn n_replicas(&self) -> usize {
        self.replicas.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn dominations(&self) -> &[(usize, usize)] {
        &self.dominations
    }

    /// Envelope event rate `(N²/2)·Σ_i τ(M(i))·d(i)`.
    pub fn total_rate(&self) -> f64 {
        let n = self.n_sites() as f64;
        0.5 * n * n * self.envelope.total()
    }

    /// Snapshot of one replica.
    pub fn occupation(&self, r: usize) -> OccupationVector {
        OccupationVector::new(self.replicas[r].clone(), self.density)
            .expect("particle number conserved")
    }

    fn resolve_level<R: Rng + ?Sized>(&self, site: usize, rng: &mut R) -> u32 {
        let m = self.max_occ[site] as u64;
        let u = rng.gen::<f64>() * self.rate.tau(m);
        // Smallest level l ∈ {1, …, M} with τ(l) > u; levels with zero rate
        // increment (flat stretches of τ) are skipped automatically.
        let mut lo = 1u64;
        let mut hi = m;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.rate.tau(mid) > u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo as u32
    }

    /// Executes one envelope event; returns `false` from an absorbing state.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let total = self.total_rate();
        if total <= 0.0 {
            return false;
        }
        let dt = -(1.0 - rng.gen::<f64>()).ln();
        self.time += dt / total;
        self.fire(rng);
        self.events += 1;
        true
    }

    fn fire<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.n_sites();
        let from = self
            .envelope
            .sample(rng)
            .expect("positive envelope rate implies a positive weight");
        let to = if from == 0 {
            1
        } else if from == n - 1 {
            n - 2
        } else if rng.gen::<bool>() {
            from + 1
        } else {
            from - 1
        };
        let level = self.resolve_level(from, rng);
        // The height entry a jump changes: partial sum through `from` for a
        // right move, through `to` for a left move.
        let touched = from.min(to);
        for r in 0..self.replicas.len() {
            if self.replicas[r][from] >= level {
                self.replicas[r][from] -= 1;
                self.replicas[r][to] += 1;
                if to > from {
                    self.heights[r][touched] -= 1;
                } else {
                    self.heights[r][touched] += 1;
                }
            }
        }
        // Order preservation is a structural guarantee of the level clocks;
        // enforce it unconditionally at the single height entry that moved.
        for &(a, b) in &self.dominations {
            assert!(
                self.heights[a][touched] >= self.heights[b][touched],
                "height order broken at site {touched} (replicas {a} ≥ {b})"
            );
        }
        for i in [from, to] {
            let m = self
                .replicas
                .iter()
                .map(|r| r[i])
                .max()
                .expect("non-empty");
            self.max_occ[i] = m;
            self.envelope
                .set(i, self.rate.tau(m as u64) * directions(i, n));
        }
        self.audit();
    }

    /// Runs all replicas to `time + duration` under the shared noise.
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

    /// Full-state audit: partial sums, envelope weights, particle numbers,
    /// and the complete height order for every recorded domination.
    pub fn validate(&self) -> Result<(), ZrpError> {
        let n = self.n_sites();
        let total0: i64 = *self.heights[0].last().expect("non-empty");
        for (r, counts) in self.replicas.iter().enumerate() {
            let sums = partial_sums(counts);
            if sums != self.heights[r] {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "cached partial sums desynchronized in replica {r}"
                )));
            }
            if *sums.last().expect("non-empty") != total0 {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "particle number drifted in replica {r}"
                )));
            }
        }
        for i in 0..n {
            let m = self.replicas.iter().map(|r| r[i]).max().expect("non-empty");
            if m != self.max_occ[i] {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "stale envelope occupancy at site {i}"
                )));
            }
            let want = self.rate.tau(m as u64) * directions(i, n);
            if (self.envelope.get(i) - want).abs() > 1e-9 * (1.0 + want) {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "envelope weight desynchronized at site {i}"
                )));
            }
        }
        for &(a, b) in &self.dominations {
            if self.heights[a].iter().zip(&self.heights[b]).any(|(x, y)| x < y) {
                return Err(ZrpError::MismatchedReplicas(format!(
                    "height order lost between replicas {a} and {b}"
                )));
            }
        }
        Ok(())
    }

    fn audit(&self) {
        if cfg!(debug_assertions) && self.events % (1 << 16) == 0 {
            self.validate().expect("audit");
        }
    }
}

/// L¹ distance between the height fields of two replicas.
pub fn height_distance(x: &CoupledZrp, a: usize, b: usize) -> f64 {
    let ua = x.occupation(a).height_field();
    let ub = x.occupation(b).height_field();
    ua.l1_distance(&ub).expect("shared grid")
}
