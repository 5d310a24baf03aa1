//! Event-driven corner-flip dynamics for the ordered pair.
//!
//! Every interior site falls into one of four classes whose total flip rates
//! are integer multiples of `ρ/4`, `ρ = (2N)²`:
//!
//! * no corner in either path — 0 units;
//! * a corner in exactly one path, heights not locally coinciding — the
//!   corner flips at `ρ/2`: 2 units;
//! * corners in both paths without local coincidence — each flips
//!   independently at `ρ/2`: 4 units;
//! * a contact (heights coincide on the three surrounding sites, corner at
//!   the middle): the free path flips alone at `ρ/2` and both flip together
//!   at `ρ/4`: 3 units. At an upward corner the lower path `w` is free and
//!   the joint move drops both; at a downward corner the upper path `v` is
//!   free. The blocked single flip would break the ordering and never
//!   occurs.
//!
//! Local coincidence of corner heights forces a full three-site contact, so
//! the four classes are exhaustive and every allowed flip preserves the
//! ordering. Class sampling is O(1): one bucket per unit weight, a uniform
//! integer in `[0, Σ units)` picks the class, the site, and the move variant
//! in a single draw.

use crate::error::ReflectedError;
use fluctua_core::{corner_at, Corner, PathPair, Role};
use rand::Rng;

/// What a single event did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: u32,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Corner flip of one path at a non-contact site.
    Lone(Role),
    /// Free-path flip at a contact site (breaks the contact).
    ContactSingle { corner: Corner, role: Role },
    /// Joint flip of both paths at a contact site (keeps them together).
    ContactJoint { corner: Corner },
}

/// One logged contact event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEvent {
    pub time: f64,
    pub site: u32,
    pub corner: Corner,
    pub joint: bool,
}

/// Log of events that happened at contact sites.
#[derive(Debug, Clone, Default)]
pub struct ContactEventLog {
    pub entries: Vec<ContactEvent>,
}

/// Empirical measure on time × space built from a contact log: each event
/// carries mass `1/len(entries)` (declared in the returned struct), split by
/// corner direction so the two sub-measures can be compared.
#[derive(Debug, Clone)]
pub struct BinnedMeasure {
    pub t_edges: Vec<f64>,
    pub x_edges: Vec<f64>,
    /// mass[ti][xi], all events
    pub mass: Vec<Vec<f64>>,
    /// total mass of ∧-driven (upward-corner) events
    pub mass_up: f64,
    /// total mass of ∨-driven (downward-corner) events
    pub mass_down: f64,
    /// weight assigned to each event
    pub event_weight: f64,
}

/// Bin a contact log over `[0, horizon] × (0, 1)` (space measured as `k/2N`).
pub fn reflection_measure(
    log: &ContactEventLog,
    two_n: u32,
    horizon: f64,
    t_bins: usize,
    x_bins: usize,
) -> BinnedMeasure {
    let t_edges: Vec<f64> = (0..=t_bins).map(|i| horizon * i as f64 / t_bins as f64).collect();
    let x_edges: Vec<f64> = (0..=x_bins).map(|i| i as f64 / x_bins as f64).collect();
    let mut mass = vec![vec![0.0; x_bins]; t_bins];
    let n = log.entries.len();
    let event_weight = if n == 0 { 0.0 } else { 1.0 / n as f64 };
    let (mut mass_up, mut mass_down) = (0.0, 0.0);
    for e in &log.entries {
        let ti = ((e.time / horizon * t_bins as f64) as usize).min(t_bins - 1);
        let x = f64::from(e.site) / f64::from(two_n);
        let xi = ((x * x_bins as f64) as usize).min(x_bins - 1);
        mass[ti][xi] += event_weight;
        match e.corner {
            Corner::Up => mass_up += event_weight,
            Corner::Down => mass_down += event_weight,
        }
    }
    BinnedMeasure { t_edges, x_edges, mass, mass_up, mass_down, event_weight }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SiteClass {
    Idle,
    Lone(Role),
    Contact(Corner),
    Both,
}

impl SiteClass {
    fn units(self) -> u64 {
        match self {
            SiteClass::Idle => 0,
            SiteClass::Lone(_) => 2,
            SiteClass::Contact(_) => 3,
            SiteClass::Both => 4,
        }
    }

    fn bucket(self) -> Option<usize> {
        match self.units() {
            0 => None,
            u => Some(u as usize - 2), // units 2,3,4 → buckets 0,1,2
        }
    }
}

const NO_POS: u32 = u32::MAX;

/// Event-driven simulator; time is in diffusive units (rates carry `(2N)²`).
pub struct ReflectedDynamics {
    pair: PathPair,
    class: Vec<SiteClass>,
    /// buckets[b] lists sites of class with `b+2` units
    buckets: [Vec<u32>; 3],
    /// position of each site in its bucket (NO_POS when idle)
    pos: Vec<u32>,
    total_units: u64,
    time: f64,
    events: u64,
    log: Option<ContactEventLog>,
}

impl ReflectedDynamics {
    pub fn new(pair: PathPair) -> Self {
        let two_n = pair.two_n() as usize;
        let mut sim = Self {
            pair,
            class: vec![SiteClass::Idle; two_n + 1],
            buckets: [Vec::new(), Vec::new(), Vec::new()],
            pos: vec![NO_POS; two_n + 1],
            total_units: 0,
            time: 0.0,
            events: 0,
            log: None,
        };
        for k in 1..two_n {
            sim.reclassify(k);
        }
        sim
    }

    /// Enables contact-event logging (entries accumulate until taken).
    pub fn enable_logging(&mut self) {
        self.log = Some(ContactEventLog::default());
    }

    pub fn take_log(&mut self) -> Option<ContactEventLog> {
        self.log.take()
    }

    pub fn state(&self) -> &PathPair {
        &self.pair
    }

    pub fn into_state(self) -> PathPair {
        self.pair
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    /// Total jump rate of the current state.
    pub fn total_rate(&self) -> f64 {
        let rho = (self.pair.two_n() as f64).powi(2);
        rho / 4.0 * self.total_units as f64
    }

    /// Executes one event and returns it. `None` if the state is absorbing
    /// (no corners anywhere — impossible for a pinned pair, kept for safety).
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Event> {
        if self.total_units == 0 {
            return None;
        }
        let dt = -(1.0 - rng.gen::<f64>()).ln() / self.total_rate();
        self.time += dt;
        Some(self.fire(rng))
    }

    /// Runs until `self.time() + duration`; an exponential holding interval
    /// that would overshoot the deadline is discarded (memorylessness makes
    /// the restart exact). Returns the number of events executed.
    pub fn run_for<R: Rng + ?Sized>(&mut self, duration: f64, rng: &mut R) -> u64 {
        let deadline = self.time + duration;
        let mut executed = 0;
        while self.total_units > 0 {
            let dt = -(1.0 - rng.gen::<f64>()).ln() / self.total_rate();
            if self.time + dt > deadline {
                break;
            }
            self.time += dt;
            self.fire(rng);
            executed += 1;
        }
        self.time = deadline;
        executed
    }

    /// Draws the event variant: class ∝ count × units, site uniform within
    /// the class, and the move variant from the residue of the same draw.
    fn fire<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Event {
        let u2 = 2 * self.buckets[0].len() as u64;
        let u3 = 3 * self.buckets[1].len() as u64;
        let r = rng.gen_range(0..self.total_units);
        let (site, variant) = if r < u2 {
            (self.buckets[0][(r / 2) as usize], 0)
        } else if r < u2 + u3 {
            let q = r - u2;
            (self.buckets[1][(q / 3) as usize], (q % 3) as u32)
        } else {
            let q = r - u2 - u3;
            (self.buckets[2][(q / 4) as usize], (q % 4) as u32)
        };
        let k = site as usize;
        let kind = match self.class[k] {
            SiteClass::Idle => unreachable!("idle sites carry no weight"),
            SiteClass::Lone(role) => {
                self.pair.flip(role, k);
                EventKind::Lone(role)
            }
            SiteClass::Both => {
                let role = if variant < 2 { Role::V } else { Role::W };
                self.pair.flip(role, k);
                EventKind::Lone(role)
            }
            SiteClass::Contact(corner) => {
                let free = match corner {
                    Corner::Up => Role::W,
                    Corner::Down => Role::V,
                };
                if variant < 2 {
                    self.pair.flip(free, k);
                    EventKind::ContactSingle { corner, role: free }
                } else {
                    // flip the path that moves away from the other one first
                    // so the intermediate state stays ordered
                    match corner {
                        Corner::Up => {
                            self.pair.flip(Role::W, k);
                            self.pair.flip(Role::V, k);
                        }
                        Corner::Down => {
                            self.pair.flip(Role::V, k);
                            self.pair.flip(Role::W, k);
                        }
                    }
                    EventKind::ContactJoint { corner }
                }
            }
        };
        if let (Some(log), EventKind::ContactSingle { corner, .. } | EventKind::ContactJoint { corner }) =
            (&mut self.log, kind)
        {
            log.entries.push(ContactEvent {
                time: self.time,
                site,
                corner,
                joint: matches!(kind, EventKind::ContactJoint { .. }),
            });
        }
        for s in [k - 1, k, k + 1] {
            self.reclassify(s);
        }
        self.events += 1;
        // Per-event local invariants (ordering, increments, corner-ness at
        // the flipped site) are hard-asserted inside `PathPair::flip` in
        // debug builds; a flip perturbs exactly one height, so those local
        // checks imply the global ones. The full O(N) audit runs
        // periodically to also cover the bucket bookkeeping.
        #[cfg(debug_assertions)]
        if self.events % (1 << 18) == 0 {
            self.assert_valid();
        }
        Event { time: self.time, site, kind }
    }

    fn classify(&self, k: usize) -> SiteClass {
        if k == 0 || k == self.pair.two_n() as usize {
            return SiteClass::Idle;
        }
        let cv = corner_at(self.pair.v(), k);
        let cw = corner_at(self.pair.w(), k);
        if self.pair.is_contact(k) {
            match cv {
                Some(c) => SiteClass::Contact(c),
                None => SiteClass::Idle, // straight run through coinciding heights
            }
        } else {
            match (cv, cw) {
                (Some(_), Some(_)) => SiteClass::Both,
                (Some(_), None) => SiteClass::Lone(Role::V),
                (None, Some(_)) => SiteClass::Lone(Role::W),
                (None, None) => SiteClass::Idle,
            }
        }
    }

    fn reclassify(&mut self, k: usize) {
        let new = self.classify(k);
        let old = self.class[k];
        if new == old {
            return;
        }
        // remove from the old bucket by swap-remove
        if let Some(b) = old.bucket() {
            let idx = self.pos[k] as usize;
            let last = *self.buckets[b].last().expect("bucket holds the site");
            self.buckets[b][idx] = last;
            self.pos[last as usize] = idx as u32;
            self.buckets[b].pop();
            self.pos[k] = NO_POS;
        }
        if let Some(b) = new.bucket() {
            self.pos[k] = self.buckets[b].len() as u32;
            self.buckets[b].push(k as u32);
        }
        self.total_units = self.total_units + new.units() - old.units();
        self.class[k] = new;
    }

    /// Full invariant check: classes, buckets and weights agree with a fresh
    /// classification, and the pair itself is valid.
    pub fn validate(&self) -> Result<(), ReflectedError> {
        PathPair::new(self.pair.v().to_vec(), self.pair.w().to_vec())?;
        let mut units = 0u64;
        for k in 0..=self.pair.two_n() as usize {
            let expect = self.classify(k);
            if expect != self.class[k] {
                return Err(ReflectedError::BrokenInvariant(format!("stale class at site {k}")));
            }
            units += expect.units();
            if let Some(b) = expect.bucket() {
                let idx = self.pos[k];
                if idx == NO_POS || self.buckets[b][idx as usize] != k as u32 {
                    return Err(ReflectedError::BrokenInvariant(format!(
                        "bucket position desync at site {k}"
                    )));
                }
            }
        }
        if units != self.total_units {
            return Err(ReflectedError::BrokenInvariant(format!(
                "unit total {} ≠ recount {units}",
                self.total_units
            )));
        }
        Ok(())
    }

    #[cfg(debug_assertions)]
    fn assert_valid(&self) {
        // per-event hard assertion (debug builds and tests)
        assert!(self.validate().is_ok(), "dynamics invariant broken at event {}", self.events);
    }
}

/// Rate-weighted transitions of a state, in integer units of `ρ/4`.
/// The brute-force generator row used by the exact finite-state checks.
pub fn transitions(pair: &PathPair) -> Vec<(PathPair, u64)> {
    let two_n = pair.two_n() as usize;
    let mut out = Vec::new();
    for k in 1..two_n {
        let cv = corner_at(pair.v(), k);
        let cw = corner_at(pair.w(), k);
        if pair.is_contact(k) {
            let Some(corner) = cv else { continue };
            let free = match corner {
                Corner::Up => Role::W,
                Corner::Down => Role::V,
            };
            let mut single = pair.clone();
            single.flip(free, k);
            out.push((single, 2));
            let mut joint = pair.clone();
            match corner {
                Corner::Up => {
                    joint.flip(Role::W, k);
                    joint.flip(Role::V, k);
                }
                Corner::Down => {
                    joint.flip(Role::V, k);
                    joint.flip(Role::W, k);
                }
            }
            out.push((joint, 1));
        } else {
            if cv.is_some() {
                let mut next = pair.clone();
                next.flip(Role::V, k);
                out.push((next, 2));
            }
            if cw.is_some() {
                let mut next = pair.clone();
                next.flip(Role::W, k);
                out.push((next, 2));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::sample_pair;
    use fluctua_core::rng::stream;

    #[test]
    fn smallest_contact_state_has_the_stated_rates() {
        // 2N=2, v=w=(0,1,0): one contact with an upward corner; free path w
        // flips alone (2 units of ρ/4 = (2N)²/2 = 2) and the joint flip adds
        // 1 unit (rate 1)
        let pair = PathPair::new(vec![0, 1, 0], vec![0, 1, 0]).unwrap();
        let sim = ReflectedDynamics::new(pair.clone());
        assert_eq!(sim.total_units, 3);
        assert!((sim.total_rate() - 3.0).abs() < 1e-15);
        let ts = transitions(&pair);
        assert_eq!(ts.len(), 2);
        let single = ts.iter().find(|(_, u)| *u == 2).unwrap();
        assert_eq!(single.0.w(), &[0, -1, 0]);
        assert_eq!(single.0.v(), &[0, 1, 0]);
        let joint = ts.iter().find(|(_, u)| *u == 1).unwrap();
        assert_eq!(joint.0.v(), &[0, -1, 0]);
        assert_eq!(joint.0.w(), &[0, -1, 0]);
    }

    #[test]
    fn non_contact_corners_flip_independently() {
        // v=(0,1,2,1,0), w=(0,-1,-2,-1,0): each path has one corner at k=2
        let pair = PathPair::new(vec![0, 1, 2, 1, 0], vec![0, -1, -2, -1, 0]).unwrap();
        let sim = ReflectedDynamics::new(pair.clone());
        // site 2 has corners in both paths, no contact: 4 units; sites 1,3 idle
        assert_eq!(sim.total_units, 4);
        let ts = transitions(&pair);
        assert_eq!(ts.len(), 2);
        assert!(ts.iter().all(|(_, u)| *u == 2));
    }

    #[test]
    fn straight_run_coincidence_is_idle() {
        // heights coincide on {1,2,3} but run straight: no corner, no moves there
        let pair = PathPair::new(vec![0, 1, 2, 3, 2, 1, 0], vec![0, 1, 2, 3, 2, 1, 0]).unwrap();
        let sim = ReflectedDynamics::new(pair);
        // only the apex (k=3) is flippable: a contact with an upward corner
        assert_eq!(sim.total_units, 3);
    }

    #[test]
    fn long_runs_keep_invariants_and_conserve_time() {
        let mut rng = stream(13, "reflected.dynamics", 0);
        let pair = sample_pair(16, &mut rng).unwrap();
        let mut sim = ReflectedDynamics::new(pair);
        sim.enable_logging();
        let executed = sim.run_for(0.35, &mut rng);
        assert!(executed > 100, "expected plenty of events, got {executed}");
        assert!((sim.time() - 0.35).abs() < 1e-12);
        sim.validate().unwrap();
        let log = sim.take_log().unwrap();
        for e in &log.entries {
            assert!(e.time <= 0.35 && e.site >= 1 && e.site < 16);
        }
    }

    #[test]
    fn binned_measure_bookkeeping() {
        let log = ContactEventLog {
            entries: vec![
                ContactEvent { time: 0.1, site: 3, corner: Corner::Up, joint: false },
                ContactEvent { time: 0.2, site: 5, corner: Corner::Down, joint: true },
                ContactEvent { time: 0.9, site: 3, corner: Corner::Up, joint: false },
            ],
        };
        let m = reflection_measure(&log, 8, 1.0, 4, 4);
        let total: f64 = m.mass.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((m.mass_up - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.mass_down - 1.0 / 3.0).abs() < 1e-12);
        let empty = reflection_measure(&ContactEventLog::default(), 8, 1.0, 4, 4);
        assert_eq!(empty.event_weight, 0.0);
        assert!(empty.mass.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn absorbing_free_state_is_impossible_for_bridges() {
        // a pinned bridge always has at least one corner
        let mut rng = stream(13, "reflected.dynamics", 1);
        for _ in 0..50 {
            let pair = sample_pair(8, &mut rng).unwrap();
            let sim = ReflectedDynamics::new(pair);
            assert!(sim.total_units > 0);
        }
    }
}
