//! Global monotone coupling of several ordered pairs.
//!
//! All replicas listen to one family of exponential clocks indexed by
//! `(site, move direction, path role)`, each ringing at rate `ρ/2`, plus one
//! uniform mark per ring. A replica responds to `(k, d, X)` when path `X`
//! has a corner at `k` whose flip moves in direction `d`:
//!
//! * no local coincidence — the corner flips;
//! * at a contact where `X` is the free path (lower path for down-moves,
//!   upper for up-moves) — `X` flips alone;
//! * at a contact where `X` is the blocked path — both paths flip together
//!   when the shared mark is below 1/2, otherwise nothing happens.
//!
//! Per replica the marginal rates are exactly those of the single-pair
//! dynamics (`ρ/2` lone and free flips, `ρ/4` joint). The coupling is
//! monotone: if one replica dominates another pointwise in both paths, any
//! height equality between them at a ringing site forces the two local
//! configurations to agree — in the dangerous cases both replicas sit at
//! contacts and consult the same mark — so no event can break the
//! domination. Equality of heights elsewhere is harmless because the flip
//! moves only the ringing site.

use crate::error::ReflectedError;
use fluctua_core::{Corner, PathPair, Role};
use rand::Rng;

/// Direction the tip of a corner moves when flipped. An upward corner (`∧`)
/// moves down, a downward corner (`∨`) moves up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Up,
    Down,
}

impl Move {
    fn matches(self, corner: Corner) -> bool {
        matches!((self, corner), (Move::Down, Corner::Up) | (Move::Up, Corner::Down))
    }
}

/// Replica set driven by shared clocks.
pub struct CoupledReflected {
    replicas: Vec<PathPair>,
    /// pairs (a, b) with replica a ≥ replica b pointwise, asserted per event
    dominations: Vec<(usize, usize)>,
    two_n: usize,
    time: f64,
    events: u64,
}

impl CoupledReflected {
    /// Couples the given replicas. Every pointwise domination present in the
    /// initial set is recorded and hard-asserted after every event.
    pub fn new(replicas: Vec<PathPair>) -> Result<Self, ReflectedError> {
        let Some(first) = replicas.first() else {
            return Err(ReflectedError::BrokenInvariant("empty replica set".into()));
        };
        let two_n = first.two_n();
        if replicas.iter().any(|p| p.two_n() != two_n) {
            return Err(ReflectedError::BrokenInvariant("mixed path lengths".into()));
        }
        let mut dominations = Vec::new();
        for a in 0..replicas.len() {
            for b in 0..replicas.len() {
                if a != b && dominates(&replicas[a], &replicas[b]) {
                    dominations.push((a, b));
                }
            }
        }
        Ok(Self { replicas, dominations, two_n, time: 0.0, events: 0 })
    }

    /// Appends the pointwise max and min envelopes of the current replicas
    /// and returns their indices. Every replica is sandwiched between them,
    /// and stays so forever by monotonicity.
    pub fn push_envelopes(&mut self) -> (usize, usize) {
        let steps = self.two_n as usize;
        let fold = |pick: fn(i32, i32) -> i32| {
            let mut v = self.replicas[0].v().to_vec();
            let mut w = self.replicas[0].w().to_vec();
            for r in &self.replicas[1..] {
                for k in 0..=steps {
                    v[k] = pick(v[k], r.v()[k]);
                    w[k] = pick(w[k], r.w()[k]);
                }
            }
            PathPair::new(v, w).expect("envelope of ordered pairs is an ordered pair")
        };
        let hi = fold(i32::max);
        let lo = fold(i32::min);
        let hi_idx = self.replicas.len();
        let lo_idx = hi_idx + 1;
        for i in 0..self.replicas.len() {
            self.dominations.push((hi_idx, i));
            self.dominations.push((i, lo_idx));
        }
        self.dominations.push((hi_idx, lo_idx));
        self.replicas.push(hi);
        self.replicas.push(lo);
        (hi_idx, lo_idx)
    }

    pub fn replicas(&self) -> &[PathPair] {
        &self.replicas
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Rescaled L¹ distance between two replicas.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.replicas[a].distance(&self.replicas[b]).expect("replicas share one length")
    }

    /// Total ring rate: (2N−1) interior sites × 2 directions × 2 roles × ρ/2.
    fn ring_rate(&self) -> f64 {
        let rho = (self.two_n as f64).powi(2);
        (self.two_n as f64 - 1.0) * 2.0 * rho
    }

    /// Advances all replicas to `time() + duration`.
    pub fn run_for<R: Rng + ?Sized>(&mut self, duration: f64, rng: &mut R) -> u64 {
        let deadline = self.time + duration;
        let rate = self.ring_rate();
        let mut executed = 0;
        loop {
            let dt = -(1.0 - rng.gen::<f64>()).ln() / rate;
            if self.time + dt > deadline {
                break;
            }
            self.time += dt;
            self.ring(rng);
            executed += 1;
        }
        self.time = deadline;
        executed
    }

    fn ring<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let site = rng.gen_range(1..self.two_n) as usize;
        let bits = rng.gen_range(0..4u8);
        let mv = if bits & 1 == 0 { Move::Down } else { Move::Up };
        let role = if bits & 2 == 0 { Role::V } else { Role::W };
        let mark: f64 = rng.gen();
        for pair in &mut self.replicas {
            respond(pair, site, mv, role, mark);
        }
        self.events += 1;
        // ordering hard assertion: the event touched only `site`, so
        // domination can only break there
        for &(a, b) in &self.dominations {
            assert!(
                self.replicas[a].v()[site] >= self.replicas[b].v()[site]
                    && self.replicas[a].w()[site] >= self.replicas[b].w()[site],
                "coupling broke replica domination {a} ≥ {b} at site {site}, event {}",
                self.events
            );
        }
    }
}

/// Applies one clock ring to a single replica (the thinning rule above).
fn respond(pair: &mut PathPair, site: usize, mv: Move, role: Role, mark: f64) {
    let Some(corner) = pair.corner(role, site) else {
        return;
    };
    if !mv.matches(corner) {
        return;
    }
    if !pair.is_contact(site) {
        pair.flip(role, site);
        return;
    }
    let free = match corner {
        Corner::Up => Role::W,
        Corner::Down => Role::V,
    };
    if role == free {
        pair.flip(role, site);
    } else if mark < 0.5 {
        // joint move; flip the path that moves away from its partner first
        match corner {
            Corner::Up => {
                pair.flip(Role::W, site);
                pair.flip(Role::V, site);
            }
            Corner::Down => {
                pair.flip(Role::V, site);
                pair.flip(Role::W, site);
            }
        }
    }
}

fn dominates(a: &PathPair, b: &PathPair) -> bool {
    a.v().iter().zip(b.v()).all(|(x, y)| x >= y) && a.w().iter().zip(b.w()).all(|(x, y)| x >= y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ReflectedDynamics;
    use crate::sample::sample_pair;
    use fluctua_core::rng::stream;
    use fluctua_core::stats::Accumulator;
    use std::collections::HashMap;

    #[test]
    fn identical_initials_stay_identical() {
        let mut rng = stream(17, "reflected.coupling", 0);
        let p = sample_pair(12, &mut rng).unwrap();
        let mut coupled = CoupledReflected::new(vec![p.clone(), p]).unwrap();
        coupled.run_for(0.3, &mut rng);
        assert_eq!(coupled.replicas()[0].v(), coupled.replicas()[1].v());
        assert_eq!(coupled.replicas()[0].w(), coupled.replicas()[1].w());
        assert!(coupled.events() > 100);
    }

    #[test]
    fn envelopes_sandwich_unordered_replicas() {
        let mut rng = stream(17, "reflected.coupling", 1);
        let a = sample_pair(16, &mut rng).unwrap();
        let b = sample_pair(16, &mut rng).unwrap();
        let mut coupled = CoupledReflected::new(vec![a, b]).unwrap();
        let (hi, lo) = coupled.push_envelopes();
        // the domination assertions run on every event; a long run is the test
        coupled.run_for(0.5, &mut rng);
        assert!(coupled.events() > 1000);
        assert!(coupled.distance(hi, lo) >= coupled.distance(0, 1) - 1e-12);
    }

    #[test]
    fn coupled_marginal_law_matches_single_pair_dynamics() {
        // evolve 2N=4 from a fixed state under both engines; the time-t laws
        // must agree (two-sample chi-square over the 20-state space)
        let start = PathPair::new(vec![0, 1, 0, 1, 0], vec![0, -1, 0, -1, 0]).unwrap();
        let horizon = 0.15;
        let draws = 20_000;
        let mut single_counts: HashMap<String, u64> = HashMap::new();
        let mut coupled_counts: HashMap<String, u64> = HashMap::new();
        let mut rng = stream(17, "reflected.coupling.law", 2);
        for _ in 0..draws {
            let mut sim = ReflectedDynamics::new(start.clone());
            sim.run_for(horizon, &mut rng);
            *single_counts.entry(format!("{:?}", sim.state().v())).or_default() += 1;
            let mut coupled = CoupledReflected::new(vec![start.clone()]).unwrap();
            coupled.run_for(horizon, &mut rng);
            *coupled_counts.entry(format!("{:?}", coupled.replicas()[0].v())).or_default() += 1;
        }
        // pooled two-sample chi-square
        let keys: Vec<&String> = single_counts.keys().chain(coupled_counts.keys()).collect();
        let mut stat = 0.0;
        let mut cells = 0usize;
        let mut seen = std::collections::HashSet::new();
        for k in keys {
            if !seen.insert(k.clone()) {
                continue;
            }
            let a = *single_counts.get(k).unwrap_or(&0) as f64;
            let b = *coupled_counts.get(k).unwrap_or(&0) as f64;
            let e = (a + b) / 2.0;
            if a + b < 10.0 {
                continue; // skip sparse cells
            }
            stat += (a - e) * (a - e) / e + (b - e) * (b - e) / e;
            cells += 1;
        }
        // statistic ~ χ²(cells−1): mean cells−1, sd √(2(cells−1))
        let dof = (cells - 1) as f64;
        assert!(
            stat < dof + 6.0 * (2.0 * dof).sqrt(),
            "two-sample χ² = {stat:.1} at {cells} cells"
        );
    }

    #[test]
    fn stationary_distance_does_not_grow() {
        // small version of the contraction experiment
        let mut rng = stream(17, "reflected.coupling.contract", 3);
        let mut start = Accumulator::default();
        let mut end = Accumulator::default();
        for _ in 0..60 {
            let a = sample_pair(16, &mut rng).unwrap();
            let b = sample_pair(16, &mut rng).unwrap();
            let mut coupled = CoupledReflected::new(vec![a, b]).unwrap();
            start.push(coupled.distance(0, 1));
            coupled.run_for(0.25, &mut rng);
            end.push(coupled.distance(0, 1));
        }
        let gap = end.mean() - start.mean();
        let se = (end.se().powi(2) + start.se().powi(2)).sqrt();
        assert!(gap < 3.0 * se, "distance grew: {} → {} (se {se})", start.mean(), end.mean());
    }
}
