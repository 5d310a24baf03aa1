//! Exact finite-state generators for the three lattice models.
//!
//! Each builder enumerates the full state space (guarded by [`STATE_LIMIT`]),
//! assembles the jump-rate matrix in floating point for the linear-algebra
//! layer, and keeps enough model structure to recompute every rate and every
//! invariant weight as an exact rational.  Stationarity and reversibility are
//! then checked in exact arithmetic: a zero residual is an algebraic identity,
//! not a small number under a tolerance.
//!
//! Rates follow the simulation crates.  The ordered pair flips corners in
//! integer units of `(2N)²/4`; the zero-range process expels a particle from
//! a site holding `k` of them at rate `(N²/2)·τ(k)` toward each admissible
//! neighbour; the integer interface resamples each interior site at rate `N²`
//! from the conditional weight `q^{|k−a|+|b−k|}` truncated to `{0,…,cap}`.

use std::collections::HashMap;

use fluctua_core::path::PathPair;
use fluctua_core::{FluctuationField, OccupationVector, TestFunction};
use fluctua_reflected::{enumerate_states, transitions};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::VerifyError;

/// Hard ceiling on the number of enumerated states.
pub const STATE_LIMIT: usize = 200_000;

/// Largest state count for which the pairwise distance table is materialized.
pub const METRIC_LIMIT: usize = 2_048;

/// A state rescaled to fluctuation-field coordinates: one field for height
/// models, the ordered `(v, w)` pair for the reflected interface.
#[derive(Debug, Clone)]
pub enum Embedding {
    Single(FluctuationField),
    Pair(FluctuationField, FluctuationField),
}

impl Embedding {
    /// `L¹` distance between two embedded states; for pairs the two component
    /// distances are added, matching the coupling metric of the simulators.
    pub fn distance(&self, other: &Embedding) -> f64 {
        match (self, other) {
            (Embedding::Single(a), Embedding::Single(b)) => {
                a.l1_distance(b).expect("embeddings of one generator share a grid")
            }
            (Embedding::Pair(av, aw), Embedding::Pair(bv, bw)) => {
                av.l1_distance(bv).expect("embeddings of one generator share a grid")
                    + aw.l1_distance(bw).expect("embeddings of one generator share a grid")
            }
            _ => panic!("cannot mix single and pair embeddings"),
        }
    }

    /// Grid resolution of the underlying field(s).
    pub fn resolution(&self) -> usize {
        match self {
            Embedding::Single(u) => u.resolution(),
            Embedding::Pair(v, _) => v.resolution(),
        }
    }
}

/// Test-function pairing matching the embedding shape: one function against a
/// height field, or a `(φv, φw)` pair against the two ordered paths.
#[derive(Debug, Clone, Copy)]
pub enum PsiPairing<'a> {
    Single(&'a TestFunction),
    Pair(&'a TestFunction, &'a TestFunction),
}

/// Exact stationarity and reversibility defects of a candidate invariant.
#[derive(Debug, Clone)]
pub struct StationarityReport {
    /// `‖mᵀQ‖_∞` evaluated in exact rational arithmetic.
    pub flow: BigRational,
    /// `max_{x≠y} |m(x)Q(x,y) − m(y)Q(y,x)|`, exact.
    pub detailed_balance: BigRational,
}

impl StationarityReport {
    /// Combined residual `flow + detailed balance`.
    pub fn residual(&self) -> BigRational {
        &self.flow + &self.detailed_balance
    }

    /// Whether both defects vanish identically.
    pub fn is_exact(&self) -> bool {
        self.flow.is_zero() && self.detailed_balance.is_zero()
    }
}

/// Model-specific state storage plus whatever is needed to rebuild any jump
/// rate as an exact rational from the two endpoint states.
enum ModelData {
    Reflected {
        pairs: Vec<PathPair>,
        /// One corner-flip unit, `(2N)²/4`.
        unit: BigRational,
    },
    Zrp {
        counts: Vec<Vec<u32>>,
        /// `τ(1), τ(2), …` as exact rationals.
        tau: Vec<BigRational>,
        /// Per-direction rate scale `N²/2`.
        edge_scale: BigRational,
    },
    GradPhi {
        heights: Vec<Vec<u32>>,
        /// `q^p` for `p = 0..=2·cap`.
        qpow: Vec<BigRational>,
        cap: u32,
        /// Site resampling rate `N²`.
        site_scale: BigRational,
    },
}

/// A fully enumerated continuous-time Markov generator with its candidate
/// invariant measure, state embeddings, and an exact-rational view of every
/// rate.
pub struct FiniteGenerator {
    label: String,
    rows: Vec<Vec<(usize, f64)>>,
    diag: Vec<f64>,
    incoming: Vec<Vec<(usize, f64)>>,
    m: Vec<f64>,
    exact_m: Vec<BigRational>,
    embeddings: Vec<Embedding>,
    metric: Option<Vec<f64>>,
    data: ModelData,
}

impl FiniteGenerator {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n_states(&self) -> usize {
        self.m.len()
    }

    /// Candidate invariant probability vector (floating-point view).
    pub fn invariant(&self) -> &[f64] {
        &self.m
    }

    /// Candidate invariant as exact rationals, summing to one.
    pub fn exact_invariant(&self) -> &[BigRational] {
        &self.exact_m
    }

    /// Off-diagonal rates out of state `x` as `(target, rate)` pairs.
    pub fn row(&self, x: usize) -> &[(usize, f64)] {
        &self.rows[x]
    }

    /// Diagonal entry `Q(x,x) = −Σ_y Q(x,y)`.
    pub fn diagonal(&self, x: usize) -> f64 {
        self.diag[x]
    }

    /// Incoming rates `(source, Q(source, x))` of state `x`.
    pub fn incoming(&self, x: usize) -> &[(usize, f64)] {
        &self.incoming[x]
    }

    pub fn embedding(&self, x: usize) -> &Embedding {
        &self.embeddings[x]
    }

    pub fn embeddings(&self) -> &[Embedding] {
        &self.embeddings
    }

    /// Grid resolution shared by all state embeddings.
    pub fn resolution(&self) -> usize {
        self.embeddings[0].resolution()
    }

    /// The enumerated path pairs, when this is a reflected-pair generator.
    pub fn reflected_states(&self) -> Option<&[PathPair]> {
        match &self.data {
            ModelData::Reflected { pairs, .. } => Some(pairs),
            _ => None,
        }
    }

    /// The enumerated occupation vectors, when this is a zero-range generator.
    pub fn occupation_states(&self) -> Option<&[Vec<u32>]> {
        match &self.data {
            ModelData::Zrp { counts, .. } => Some(counts),
            _ => None,
        }
    }

    /// The enumerated interior-height vectors, for the integer interface.
    pub fn height_states(&self) -> Option<&[Vec<u32>]> {
        match &self.data {
            ModelData::GradPhi { heights, .. } => Some(heights),
            _ => None,
        }
    }

    /// Exact jump rate `Q(x,y)` recomputed from the two states.  Returns zero
    /// when no single jump connects them.
    pub fn exact_rate(&self, x: usize, y: usize) -> BigRational {
        if x == y {
            return BigRational::zero();
        }
        match &self.data {
            ModelData::Reflected { pairs, unit } => {
                let units = reflected_edge_units(&pairs[x], &pairs[y]);
                BigRational::from_integer(BigInt::from(units)) * unit
            }
            ModelData::Zrp { counts, tau, edge_scale } => {
                zrp_edge_rate(&counts[x], &counts[y], tau, edge_scale)
            }
            ModelData::GradPhi { heights, qpow, cap, site_scale } => {
                gradphi_edge_rate(&heights[x], &heights[y], qpow, *cap, site_scale)
            }
        }
    }

    /// Applies the generator to a real vector: `(Lf)(x) = Σ_y Q(x,y)(f(y) − f(x))`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>, VerifyError> {
        self.check_len(f.len())?;
        Ok((0..self.n_states())
            .map(|x| {
                self.rows[x].iter().map(|&(y, r)| r * (f[y] - f[x])).sum::<f64>()
            })
            .collect())
    }

    /// Applies the generator to a complex vector.
    pub fn apply_complex(&self, f: &[Complex64]) -> Result<Vec<Complex64>, VerifyError> {
        self.check_len(f.len())?;
        Ok((0..self.n_states())
            .map(|x| {
                self.rows[x]
                    .iter()
                    .map(|&(y, r)| (f[y] - f[x]).scale(r))
                    .sum::<Complex64>()
            })
            .collect())
    }

    /// Applies the `m`-adjoint `L*`, with `L*(x,y) = m(y)Q(y,x)/m(x)` off the
    /// diagonal and the same diagonal as `L`.
    pub fn apply_adjoint_complex(&self, f: &[Complex64]) -> Result<Vec<Complex64>, VerifyError> {
        self.check_len(f.len())?;
        Ok((0..self.n_states())
            .map(|x| {
                let inflow: Complex64 = self.incoming[x]
                    .iter()
                    .map(|&(y, r)| f[y].scale(self.m[y] * r / self.m[x]))
                    .sum();
                inflow + f[x].scale(self.diag[x])
            })
            .collect())
    }

    /// `ψφ(x) = exp(i·⟨embedding(x), φ⟩)` for every state, with the pairing
    /// evaluated through hat weights on the embedding grid.
    pub fn psi_vector(&self, pairing: &PsiPairing<'_>) -> Result<Vec<Complex64>, VerifyError> {
        let phases = self.pairing_values(pairing)?;
        Ok(phases.iter().map(|&y| Complex64::new(0.0, y).exp()).collect())
    }

    /// The real pairing values `⟨embedding(x), φ⟩` entering `ψφ`.
    pub fn pairing_values(&self, pairing: &PsiPairing<'_>) -> Result<Vec<f64>, VerifyError> {
        let l = self.resolution();
        match (pairing, &self.embeddings[0]) {
            (PsiPairing::Single(phi), Embedding::Single(_)) => {
                let w = phi.hat_weights(l)?;
                Ok(self
                    .embeddings
                    .iter()
                    .map(|e| match e {
                        Embedding::Single(u) => grid_dot(u.values(), &w),
                        Embedding::Pair(..) => unreachable!("uniform embedding shape"),
                    })
                    .collect())
            }
            (PsiPairing::Pair(phi_v, phi_w), Embedding::Pair(..)) => {
                let wv = phi_v.hat_weights(l)?;
                let ww = phi_w.hat_weights(l)?;
                Ok(self
                    .embeddings
                    .iter()
                    .map(|e| match e {
                        Embedding::Pair(v, w) => {
                            grid_dot(v.values(), &wv) + grid_dot(w.values(), &ww)
                        }
                        Embedding::Single(_) => unreachable!("uniform embedding shape"),
                    })
                    .collect())
            }
            _ => Err(VerifyError::UnsupportedOperation(
                "pairing shape does not match the state embedding".into(),
            )),
        }
    }

    /// Exact stationarity and reversibility report for the stored invariant.
    pub fn stationarity_report(&self) -> StationarityReport {
        self.stationarity_report_for(&self.exact_m)
            .expect("stored invariant has the right length")
    }

    /// Exact report for an arbitrary candidate measure, e.g. a perturbed one.
    pub fn stationarity_report_for(
        &self,
        m: &[BigRational],
    ) -> Result<StationarityReport, VerifyError> {
        self.check_len(m.len())?;
        let n = self.n_states();
        let mut column = vec![BigRational::zero(); n];
        let mut db = BigRational::zero();
        for x in 0..n {
            for &(y, _) in &self.rows[x] {
                let fwd = self.exact_rate(x, y);
                let flow = &m[x] * &fwd;
                column[y] += &flow;
                column[x] -= &flow;
                let back = self.exact_rate(y, x);
                let defect = (flow - &m[y] * &back).abs();
                if defect > db {
                    db = defect;
                }
            }
        }
        let flow = column.iter().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero);
        Ok(StationarityReport { flow, detailed_balance: db })
    }

    /// Distance between two states in the coupling metric.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if let Some(table) = &self.metric {
            table[x * self.n_states() + y]
        } else {
            self.embeddings[x].distance(&self.embeddings[y])
        }
    }

    /// The materialized pairwise distance table, when the space is small
    /// enough (`n ≤` [`METRIC_LIMIT`]); row-major `n×n`.
    pub fn metric_table(&self) -> Option<&[f64]> {
        self.metric.as_deref()
    }

    fn check_len(&self, len: usize) -> Result<(), VerifyError> {
        if len == self.n_states() {
            Ok(())
        } else {
            Err(VerifyError::BadParameter(format!(
                "vector length {len} does not match {} states",
                self.n_states()
            )))
        }
    }

    /// Shared assembly: exact weights plus exact per-edge rates become the
    /// floating-point matrix, the transpose adjacency, and the metric table.
    fn assemble(
        label: String,
        data: ModelData,
        embeddings: Vec<Embedding>,
        weights: Vec<BigRational>,
        edges: Vec<Vec<(usize, BigRational)>>,
    ) -> Self {
        let n = embeddings.len();
        let total: BigRational = weights.iter().sum();
        let exact_m: Vec<BigRational> = weights.into_iter().map(|w| w / &total).collect();
        let m: Vec<f64> =
            exact_m.iter().map(|w| w.to_f64().expect("normalized weight fits in f64")).collect();

        let mut rows = Vec::with_capacity(n);
        let mut diag = vec![0.0; n];
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (x, row) in edges.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (y, rate) in row {
                let r = rate.to_f64().expect("jump rate fits in f64");
                out.push((y, r));
                diag[x] -= r;
                incoming[y].push((x, r));
            }
            rows.push(out);
        }

        let metric = (n <= METRIC_LIMIT).then(|| {
            let mut table = vec![0.0; n * n];
            for x in 0..n {
                for y in (x + 1)..n {
                    let d = embeddings[x].distance(&embeddings[y]);
                    table[x * n + y] = d;
                    table[y * n + x] = d;
                }
            }
            table
        });

        FiniteGenerator { label, rows, diag, incoming, m, exact_m, embeddings, metric, data }
    }
}

/// Pairing `Σ_j u(j)·w(j)/L` of grid values against hat weights.
fn grid_dot(values: &[f64], weights: &[f64]) -> f64 {
    let l = (values.len() - 1) as f64;
    values.iter().zip(weights).map(|(u, w)| u * w).sum::<f64>() / l
}

/// Number of ordered bridge pairs of length `2N`, used as a pre-enumeration
/// guard: `C(2N,N)² − C(2N,N−1)·C(2N,N+1)` by the two-path determinant count.
fn reflected_state_count(two_n: u32) -> Option<u128> {
    let c = |k: u32| -> Option<u128> {
        let mut num: u128 = 1;
        for i in 0..k {
            num = num.checked_mul((two_n - i) as u128)?;
            num /= (i + 1) as u128;
        }
        Some(num)
    };
    let n = two_n / 2;
    let central = c(n)?;
    let off = c(n - 1)?;
    central.checked_mul(central)?.checked_sub(off.checked_mul(off)?)
}

/// Integer units contributed by the single jump between two ordered pairs:
/// 2 for any lone corner flip, 1 for a joint flip at a contact, 0 otherwise.
fn reflected_edge_units(a: &PathPair, b: &PathPair) -> u32 {
    let mut site_v = None;
    let mut site_w = None;
    let mut n_v = 0u32;
    let mut n_w = 0u32;
    for k in 0..=a.two_n() {
        if a.v()[k] != b.v()[k] {
            n_v += 1;
            site_v = Some(k);
        }
        if a.w()[k] != b.w()[k] {
            n_w += 1;
            site_w = Some(k);
        }
    }
    match (n_v, n_w) {
        (1, 0) | (0, 1) => 2,
        (1, 1) if site_v == site_w => {
            let k = site_v.expect("counted one differing site");
            u32::from(a.is_contact(k))
        }
        _ => 0,
    }
}

/// Exact zero-range rate between two occupation vectors differing by one jump.
fn zrp_edge_rate(
    a: &[u32],
    b: &[u32],
    tau: &[BigRational],
    edge_scale: &BigRational,
) -> BigRational {
    let mut from = None;
    let mut to = None;
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        match x as i64 - y as i64 {
            0 => {}
            1 => {
                if from.replace(i).is_some() {
                    return BigRational::zero();
                }
            }
            -1 => {
                if to.replace(i).is_some() {
                    return BigRational::zero();
                }
            }
            _ => return BigRational::zero(),
        }
    }
    match (from, to) {
        (Some(i), Some(j)) if i.abs_diff(j) == 1 => {
            let k = a[i] as usize;
            edge_scale * &tau[k - 1]
        }
        _ => BigRational::zero(),
    }
}

/// Exact heat-bath rate between two interior-height vectors differing at one
/// site: `N²·q^{|k−a|+|b−k|} / Σ_{k'} q^{|k'−a|+|b−k'|}`.
fn gradphi_edge_rate(
    h_from: &[u32],
    h_to: &[u32],
    qpow: &[BigRational],
    cap: u32,
    site_scale: &BigRational,
) -> BigRational {
    let mut site = None;
    for (i, (&x, &y)) in h_from.iter().zip(h_to).enumerate() {
        if x != y {
            if site.replace(i).is_some() {
                return BigRational::zero();
            }
        }
    }
    let Some(i) = site else {
        return BigRational::zero();
    };
    let free = h_from.len();
    let a = if i == 0 { 0 } else { h_from[i - 1] };
    let b = if i + 1 == free { 0 } else { h_from[i + 1] };
    let weight = |k: u32| -> &BigRational { &qpow[(k.abs_diff(a) + b.abs_diff(k)) as usize] };
    let z: BigRational = (0..=cap).map(|k| weight(k).clone()).sum();
    site_scale * weight(h_to[i]) / z
}

/// Builds the exact generator of the reflected interface pair on `2N` steps:
/// all ordered bridge pairs, corner-flip rates in units of `(2N)²/4`, uniform
/// invariant weight.
pub fn reflected_generator(two_n: u32) -> Result<FiniteGenerator, VerifyError> {
    if two_n < 2 || two_n % 2 != 0 {
        return Err(VerifyError::BadParameter(format!(
            "pair length must be a positive even number, got {two_n}"
        )));
    }
    let predicted = reflected_state_count(two_n)
        .ok_or_else(|| VerifyError::BadParameter(format!("state count overflows at {two_n}")))?;
    if predicted > STATE_LIMIT as u128 {
        return Err(VerifyError::StateSpaceTooLarge {
            states: predicted.min(usize::MAX as u128) as usize,
            limit: STATE_LIMIT,
        });
    }

    let pairs = enumerate_states(two_n)?;
    let n = pairs.len();
    let mut index: HashMap<(u64, u64), u32> = HashMap::with_capacity(n);
    for (i, p) in pairs.iter().enumerate() {
        index.insert(slope_key(p), i as u32);
    }

    let unit = BigRational::from_integer(BigInt::from((two_n as u64 * two_n as u64) / 4));
    let mut edges = Vec::with_capacity(n);
    for p in &pairs {
        let row: Vec<(usize, BigRational)> = transitions(p)
            .into_iter()
            .map(|(target, units)| {
                let j = index[&slope_key(&target)] as usize;
                (j, BigRational::from_integer(BigInt::from(units)) * &unit)
            })
            .collect();
        edges.push(row);
    }

    let embeddings: Vec<Embedding> = pairs
        .iter()
        .map(|p| {
            let (v, w) = p.rescaled();
            Embedding::Pair(v, w)
        })
        .collect();
    let weights = vec![BigRational::one(); n];
    Ok(FiniteGenerator::assemble(
        format!("reflected(2N={two_n})"),
        ModelData::Reflected { pairs, unit },
        embeddings,
        weights,
        edges,
    ))
}

/// Slope-bit encoding of a path pair, a compact exact key for indexing.
fn slope_key(p: &PathPair) -> (u64, u64) {
    let bits = |path: &[i32]| -> u64 {
        let mut b = 0u64;
        for k in 0..path.len() - 1 {
            if path[k + 1] > path[k] {
                b |= 1 << k;
            }
        }
        b
    };
    (bits(p.v()), bits(p.w()))
}

/// Builds the exact zero-range generator on `n_sites` sites holding a fixed
/// number of particles.  `tau[k-1]` is the exact jump intensity `τ(k)` of a
/// site holding `k` particles; the invariant weight of a configuration is
/// `Π_i 1/(τ(1)⋯τ(n_i))`, independent of the fugacity.
pub fn zrp_generator(
    n_sites: usize,
    particles: u64,
    tau: &[BigRational],
) -> Result<FiniteGenerator, VerifyError> {
    if n_sites < 2 {
        return Err(VerifyError::BadParameter("need at least two sites".into()));
    }
    if particles == 0 {
        return Err(VerifyError::BadParameter("need at least one particle".into()));
    }
    if (tau.len() as u64) < particles {
        return Err(VerifyError::BadParameter(format!(
            "rate table covers occupancies up to {}, need {particles}",
            tau.len()
        )));
    }
    if tau.iter().take(particles as usize).any(|t| !t.is_positive()) {
        return Err(VerifyError::BadParameter("jump intensities must be positive".into()));
    }
    // A count that overflows the guard arithmetic is certainly too large.
    let predicted =
        compositions_count(particles, n_sites).unwrap_or(u128::from(u64::MAX));
    if predicted > STATE_LIMIT as u128 {
        return Err(VerifyError::StateSpaceTooLarge {
            states: predicted.min(usize::MAX as u128) as usize,
            limit: STATE_LIMIT,
        });
    }

    let counts = enumerate_compositions(particles as u32, n_sites);
    let n = counts.len();
    let mut index: HashMap<Vec<u32>, u32> = HashMap::with_capacity(n);
    for (i, c) in counts.iter().enumerate() {
        index.insert(c.clone(), i as u32);
    }

    // Cumulative products τ(1)⋯τ(k); the invariant weight divides by them.
    let mut tau_fact = vec![BigRational::one()];
    for k in 0..particles as usize {
        let next = tau_fact[k].clone() * &tau[k];
        tau_fact.push(next);
    }
    let weights: Vec<BigRational> = counts
        .iter()
        .map(|c| {
            c.iter()
                .map(|&k| BigRational::one() / &tau_fact[k as usize])
                .product::<BigRational>()
        })
        .collect();

    let edge_scale = BigRational::new(
        BigInt::from(n_sites as u64 * n_sites as u64),
        BigInt::from(2),
    );
    let mut edges = Vec::with_capacity(n);
    for c in &counts {
        let mut row = Vec::new();
        for i in 0..n_sites {
            if c[i] == 0 {
                continue;
            }
            let rate = &edge_scale * &tau[c[i] as usize - 1];
            for j in [i.wrapping_sub(1), i + 1] {
                if j >= n_sites {
                    continue;
                }
                let mut target = c.clone();
                target[i] -= 1;
                target[j] += 1;
                row.push((index[&target] as usize, rate.clone()));
            }
        }
        edges.push(row);
    }

    let density = particles as f64 / n_sites as f64;
    let embeddings: Vec<Embedding> = counts
        .iter()
        .map(|c| {
            let occ = OccupationVector::new(c.clone(), density)?;
            Ok(Embedding::Single(occ.height_field()))
        })
        .collect::<Result<_, fluctua_core::CoreError>>()?;

    Ok(FiniteGenerator::assemble(
        format!("zrp(N={n_sites},K={particles})"),
        ModelData::Zrp { counts, tau: tau.to_vec(), edge_scale },
        embeddings,
        weights,
        edges,
    ))
}

/// `C(particles + sites − 1, sites − 1)` with overflow detection.
fn compositions_count(particles: u64, sites: usize) -> Option<u128> {
    let k = (sites - 1) as u128;
    let mut num: u128 = 1;
    for i in 0..k {
        num = num.checked_mul(particles as u128 + k - i)?;
        num /= i + 1;
    }
    Some(num)
}

fn enumerate_compositions(total: u32, sites: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; sites];
    fn rec(current: &mut Vec<u32>, site: usize, left: u32, out: &mut Vec<Vec<u32>>) {
        if site + 1 == current.len() {
            current[site] = left;
            out.push(current.clone());
            return;
        }
        for k in 0..=left {
            current[site] = k;
            rec(current, site + 1, left - k, out);
        }
    }
    rec(&mut current, 0, total, &mut out);
    out
}

/// Builds the exact heat-bath generator of the integer interface on `n_sites`
/// bonds with heights in `{0,…,cap}` pinned to zero at both ends.  `q` is the
/// weight per unit of height gradient, so a configuration carries the
/// invariant weight `q^{Σ_i |h_i − h_{i−1}|}`.
pub fn gradphi_generator(
    n_sites: usize,
    cap: u32,
    q: &BigRational,
) -> Result<FiniteGenerator, VerifyError> {
    if n_sites < 2 {
        return Err(VerifyError::BadParameter("need at least two bonds".into()));
    }
    if cap == 0 {
        return Err(VerifyError::BadParameter("height cap must be positive".into()));
    }
    if !q.is_positive() {
        return Err(VerifyError::BadParameter("gradient weight must be positive".into()));
    }
    let free = n_sites - 1;
    let predicted = (cap as u128 + 1).checked_pow(free as u32).ok_or_else(|| {
        VerifyError::BadParameter("state count overflows the enumeration guard".into())
    })?;
    if predicted > STATE_LIMIT as u128 {
        return Err(VerifyError::StateSpaceTooLarge {
            states: predicted.min(usize::MAX as u128) as usize,
            limit: STATE_LIMIT,
        });
    }

    let mut qpow = vec![BigRational::one()];
    for p in 0..2 * cap as usize {
        let next = qpow[p].clone() * q;
        qpow.push(next);
    }

    // Mixed-radix enumeration of all interior height vectors.
    let n = predicted as usize;
    let mut heights = Vec::with_capacity(n);
    let mut current = vec![0u32; free];
    loop {
        heights.push(current.clone());
        let mut i = 0;
        loop {
            if i == free {
                break;
            }
            if current[i] < cap {
                current[i] += 1;
                break;
            }
            current[i] = 0;
            i += 1;
        }
        if i == free {
            break;
        }
    }

    let gradient_sum = |h: &[u32]| -> usize {
        let mut total = h[0] as usize + h[free - 1] as usize;
        for i in 1..free {
            total += h[i].abs_diff(h[i - 1]) as usize;
        }
        total
    };
    // Gradient sums can exceed the tabulated 2·cap; extend on demand.
    let max_grad = heights.iter().map(|h| gradient_sum(h)).max().unwrap_or(0);
    for p in qpow.len()..=max_grad {
        let next = qpow[p - 1].clone() * q;
        qpow.push(next);
    }
    let weights: Vec<BigRational> = heights.iter().map(|h| qpow[gradient_sum(h)].clone()).collect();

    let mut index: HashMap<Vec<u32>, u32> = HashMap::with_capacity(n);
    for (i, h) in heights.iter().enumerate() {
        index.insert(h.clone(), i as u32);
    }
    let site_scale = BigRational::from_integer(BigInt::from(n_sites as u64 * n_sites as u64));
    let mut edges = Vec::with_capacity(n);
    for h in &heights {
        let mut row = Vec::new();
        for i in 0..free {
            let a = if i == 0 { 0 } else { h[i - 1] };
            let b = if i + 1 == free { 0 } else { h[i + 1] };
            let z: BigRational =
                (0..=cap).map(|k| qpow[(k.abs_diff(a) + b.abs_diff(k)) as usize].clone()).sum();
            for k in 0..=cap {
                if k == h[i] {
                    continue;
                }
                let mut target = h.clone();
                target[i] = k;
                let rate =
                    &site_scale * &qpow[(k.abs_diff(a) + b.abs_diff(k)) as usize] / &z;
                row.push((index[&target] as usize, rate));
            }
        }
        edges.push(row);
    }

    let scale = 1.0 / (n_sites as f64).sqrt();
    let embeddings: Vec<Embedding> = heights
        .iter()
        .map(|h| {
            let mut values = Vec::with_capacity(n_sites + 1);
            values.push(0.0);
            values.extend(h.iter().map(|&x| x as f64 * scale));
            values.push(0.0);
            Ok(Embedding::Single(FluctuationField::new(values)?))
        })
        .collect::<Result<_, fluctua_core::CoreError>>()?;

    Ok(FiniteGenerator::assemble(
        format!("gradphi(N={n_sites},cap={cap})"),
        ModelData::GradPhi { heights, qpow, cap, site_scale },
        embeddings,
        weights,
        edges,
    ))
}

/// Convenience exact rate table `τ(k) = k` up to `max` particles.
pub fn linear_tau(max: u64) -> Vec<BigRational> {
    (1..=max).map(|k| BigRational::from_integer(BigInt::from(k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn smallest_pair_space_has_three_states_and_the_stated_rates() {
        let g = reflected_generator(2).unwrap();
        assert_eq!(g.n_states(), 3);
        // Locate the doubled tent v = w = (0,1,0): the single contact site
        // fires a lone flip of the lower path at rate 2 and a joint flip at
        // rate 1, a total outflow of 3 (the flip unit here is (2N)²/4 = 1).
        let pairs = g.reflected_states().unwrap();
        let x = pairs.iter().position(|p| p.v() == [0, 1, 0] && p.w() == [0, 1, 0]).unwrap();
        let mut rates: Vec<f64> = g.row(x).iter().map(|&(_, r)| r).collect();
        rates.sort_by(f64::total_cmp);
        assert_eq!(rates, vec![1.0, 2.0]);
        assert_eq!(g.diagonal(x), -3.0);
        let joint = g.row(x).iter().find(|&&(_, r)| r == 1.0).unwrap().0;
        assert_eq!(pairs[joint].v(), [0, -1, 0]);
        assert_eq!(pairs[joint].w(), [0, -1, 0]);
    }

    #[test]
    fn pair_state_counts_match_the_enumeration() {
        for (two_n, count) in [(2u32, 3usize), (4, 20), (6, 175), (8, 1764)] {
            assert_eq!(reflected_state_count(two_n).unwrap(), count as u128);
            assert_eq!(reflected_generator(two_n).unwrap().n_states(), count);
        }
        assert!(matches!(
            reflected_generator(16),
            Err(VerifyError::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn two_site_jump_rate_matches_by_hand_value() {
        // Two sites, two particles, τ(k) = k: from (2,0) the only move sends
        // one particle to the empty site at rate (N²/2)·τ(2) = 2·2 = 4.
        let g = zrp_generator(2, 2, &linear_tau(2)).unwrap();
        assert_eq!(g.n_states(), 3);
        let counts = g.occupation_states().unwrap();
        let x = counts.iter().position(|c| c == &[2, 0]).unwrap();
        let y = counts.iter().position(|c| c == &[1, 1]).unwrap();
        assert_eq!(g.row(x), &[(y, 4.0)]);
        assert_eq!(g.exact_rate(x, y), ratio(4, 1));
        assert_eq!(g.exact_rate(y, x), ratio(2, 1));
    }

    #[test]
    fn invariants_are_exactly_stationary_and_reversible() {
        let reflected = reflected_generator(6).unwrap();
        assert!(reflected.stationarity_report().is_exact());

        let zrp = zrp_generator(3, 3, &linear_tau(3)).unwrap();
        assert!(zrp.stationarity_report().is_exact());

        let gradphi = gradphi_generator(3, 3, &ratio(1, 2)).unwrap();
        assert!(gradphi.stationarity_report().is_exact());
    }

    #[test]
    fn zrp_invariant_matches_inverse_factorials() {
        // τ(k) = k makes the fugacity-free weight 1/Π n_i!; check one state.
        let g = zrp_generator(3, 3, &linear_tau(3)).unwrap();
        let counts = g.occupation_states().unwrap();
        let x = counts.iter().position(|c| c == &[3, 0, 0]).unwrap();
        let y = counts.iter().position(|c| c == &[1, 1, 1]).unwrap();
        let ratio_exact = &g.exact_invariant()[y] / &g.exact_invariant()[x];
        assert_eq!(ratio_exact, ratio(6, 1));
    }

    #[test]
    fn perturbing_one_weight_breaks_stationarity() {
        let g = zrp_generator(3, 2, &linear_tau(2)).unwrap();
        let mut m = g.exact_invariant().to_vec();
        m[0] *= ratio(101, 100);
        let report = g.stationarity_report_for(&m).unwrap();
        assert!(report.flow.is_positive());
        assert!(report.detailed_balance.is_positive());
        assert!(report.residual().is_positive());
    }

    #[test]
    fn generator_rows_annihilate_constants_and_momenta() {
        // Row sums vanish, and for the zero-range chain the particle count is
        // conserved, so L applied to it is identically zero.
        let g = zrp_generator(3, 4, &linear_tau(4)).unwrap();
        let ones = vec![1.0; g.n_states()];
        for v in g.apply(&ones).unwrap() {
            assert!(v.abs() < 1e-12);
        }
        let totals: Vec<f64> = g
            .occupation_states()
            .unwrap()
            .iter()
            .map(|c| c.iter().map(|&k| k as f64).sum())
            .collect();
        for v in g.apply(&totals).unwrap() {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn adjoint_agrees_with_generator_on_reversible_chains() {
        let g = gradphi_generator(3, 2, &ratio(2, 5)).unwrap();
        let phi = TestFunction::bump(0.1, 0.9, 1.0, 64).unwrap();
        let psi = g.psi_vector(&PsiPairing::Single(&phi)).unwrap();
        let forward = g.apply_complex(&psi).unwrap();
        let adjoint = g.apply_adjoint_complex(&psi).unwrap();
        for (a, b) in forward.iter().zip(&adjoint) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn metric_table_matches_pair_distances() {
        let g = reflected_generator(4).unwrap();
        let pairs = g.reflected_states().unwrap();
        let table = g.metric_table().unwrap();
        let n = g.n_states();
        for x in 0..n {
            for y in 0..n {
                let direct = pairs[x].distance(&pairs[y]).unwrap();
                assert!((table[x * n + y] - direct).abs() < 1e-14);
                assert!((g.distance(x, y) - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn builders_reject_bad_parameters() {
        assert!(matches!(reflected_generator(3), Err(VerifyError::BadParameter(_))));
        assert!(matches!(reflected_generator(0), Err(VerifyError::BadParameter(_))));
        assert!(matches!(zrp_generator(1, 2, &linear_tau(2)), Err(VerifyError::BadParameter(_))));
        assert!(matches!(zrp_generator(3, 0, &linear_tau(1)), Err(VerifyError::BadParameter(_))));
        assert!(matches!(zrp_generator(3, 4, &linear_tau(2)), Err(VerifyError::BadParameter(_))));
        assert!(matches!(
            zrp_generator(64, 64, &linear_tau(64)),
            Err(VerifyError::StateSpaceTooLarge { .. })
        ));
        let q = BigRational::from_f64(0.5).unwrap();
        assert!(matches!(gradphi_generator(1, 2, &q), Err(VerifyError::BadParameter(_))));
        assert!(matches!(gradphi_generator(3, 0, &q), Err(VerifyError::BadParameter(_))));
        assert!(matches!(
            gradphi_generator(64, 3, &q),
            Err(VerifyError::StateSpaceTooLarge { .. })
        ));
        assert!(matches!(
            gradphi_generator(3, 3, &ratio(-1, 2)),
            Err(VerifyError::BadParameter(_))
        ));
    }

    #[test]
    fn psi_vector_lies_on_the_unit_circle_and_respects_shape() {
        let g = zrp_generator(3, 3, &linear_tau(3)).unwrap();
        let phi = TestFunction::bump(0.2, 0.8, 1.0, 48).unwrap();
        let psi = g.psi_vector(&PsiPairing::Single(&phi)).unwrap();
        assert_eq!(psi.len(), g.n_states());
        for z in &psi {
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            g.psi_vector(&PsiPairing::Pair(&phi, &phi)),
            Err(VerifyError::UnsupportedOperation(_))
        ));
    }
}
