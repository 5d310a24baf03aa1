//! Convergence of the discrete stationary pairings to their continuum limits.
//!
//! For each model the discrete functional `Σ_x F(x)·(L*ψφ)(x)·m(x)` is
//! computed either exactly (enumerated spaces) or by Monte Carlo over exact
//! stationary samples, and set against the matching continuum-limit estimate.
//! Rows track the split into bulk and contact parts for the ordered pair, so
//! the singular boundary contribution can be compared to its continuum
//! quadrature on its own.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use fluctua_core::field::FluctuationField;
use fluctua_core::rng::stream;
use fluctua_core::stats::Accumulator;
use fluctua_core::TestFunction;
use fluctua_oracle::{
    sigma_limit_pair, sigma_limit_zrp, ComplexEstimate, PairSigmaConfig,
};
use fluctua_reflected::sample_pair;
use fluctua_zrp::{CanonicalSampler, GrandCanonicalLaw, Moments, RateFunction};

use crate::error::VerifyError;
use crate::generator::{
    linear_tau, reflected_generator, zrp_generator, Embedding, FiniteGenerator, PsiPairing,
};
use crate::ibp::sigma_pairing_exact;
use crate::split::{pair_action, split_generator_action, PairCoefficients};

/// A complex Monte Carlo estimate with per-component standard errors.
/// Exact (enumerated) values are carried with zero error and `n = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexMc {
    pub value: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    /// Number of Monte Carlo samples; 0 marks an exact value.
    pub n: u64,
}

impl ComplexMc {
    pub fn exact(value: Complex64) -> Self {
        ComplexMc { value, se_re: 0.0, se_im: 0.0, n: 0 }
    }

    fn from_parts(re: &Accumulator, im: &Accumulator) -> Self {
        ComplexMc {
            value: Complex64::new(re.mean(), im.mean()),
            se_re: re.se(),
            se_im: im.se(),
            n: re.count(),
        }
    }

    fn from_estimate(e: &ComplexEstimate) -> Self {
        ComplexMc { value: Complex64::new(e.re, e.im), se_re: e.se_re, se_im: e.se_im, n: e.n }
    }

    /// Euclidean combination of the component standard errors.
    pub fn combined_se(&self) -> f64 {
        self.se_re.hypot(self.se_im)
    }
}

/// Monte Carlo estimate of the pair pairing split over stationary samples.
#[derive(Debug, Clone, Copy)]
pub struct ReflectedSigmaMc {
    pub total: ComplexMc,
    pub bulk: ComplexMc,
    pub reflection: ComplexMc,
}

/// Estimates `E_m[F·(Lψφ)]` for the ordered pair at size `2N` by exact
/// stationary sampling, split into free-motion and reflection parts.  The
/// statistic sees the rescaled pair `(v, w)`.
pub fn reflected_sigma_mc<S, R>(
    two_n: u32,
    phi_v: &TestFunction,
    phi_w: &TestFunction,
    statistic: &S,
    samples: u64,
    rng: &mut R,
) -> Result<ReflectedSigmaMc, VerifyError>
where
    S: Fn(&FluctuationField, &FluctuationField) -> f64,
    R: Rng + ?Sized,
{
    if samples < 2 {
        return Err(VerifyError::BadParameter(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    let coef = PairCoefficients::new(two_n, phi_v, phi_w)?;
    let mut acc: [Accumulator; 6] = std::array::from_fn(|_| Accumulator::new());
    for _ in 0..samples {
        let pair = sample_pair(two_n, rng)?;
        let action = pair_action(&pair, &coef);
        let (v, w) = pair.rescaled();
        let f = statistic(&v, &w);
        let weighted = [action.full, action.bulk, action.reflection].map(|z| z.scale(f));
        for (j, z) in weighted.iter().enumerate() {
            acc[2 * j].push(z.re);
            acc[2 * j + 1].push(z.im);
        }
    }
    Ok(ReflectedSigmaMc {
        total: ComplexMc::from_parts(&acc[0], &acc[1]),
        bulk: ComplexMc::from_parts(&acc[2], &acc[3]),
        reflection: ComplexMc::from_parts(&acc[4], &acc[5]),
    })
}

/// Exact pairing split on an enumerated pair space:
/// `Σ_x F(x)·(L^{A,R}ψφ)(x)·m(x)` summed state by state.
#[derive(Debug, Clone, Copy)]
pub struct ReflectedSigmaExact {
    pub total: Complex64,
    pub bulk: Complex64,
    pub reflection: Complex64,
}

pub fn reflected_sigma_exact<S>(
    g: &FiniteGenerator,
    phi_v: &TestFunction,
    phi_w: &TestFunction,
    statistic: &S,
) -> Result<ReflectedSigmaExact, VerifyError>
where
    S: Fn(&FluctuationField, &FluctuationField) -> f64,
{
    let split = split_generator_action(g, phi_v, phi_w)?;
    let m = g.invariant();
    let mut bulk = Complex64::new(0.0, 0.0);
    let mut reflection = Complex64::new(0.0, 0.0);
    for x in 0..g.n_states() {
        let f = match g.embedding(x) {
            Embedding::Pair(v, w) => statistic(v, w),
            Embedding::Single(_) => unreachable!("pair generator has pair embeddings"),
        };
        bulk += split.bulk[x].scale(f * m[x]);
        reflection += split.reflection[x].scale(f * m[x]);
    }
    Ok(ReflectedSigmaExact { total: bulk + reflection, bulk, reflection })
}

/// Estimates `E_m[F·(Lψφ)]` for the particle chain by exact canonical
/// sampling; the generator action on `ψφ` is evaluated in closed form from
/// the per-jump pairing increments.  The statistic sees the height field.
pub fn zrp_sigma_mc<S, R>(
    n_sites: usize,
    density: f64,
    rate: &RateFunction,
    phi: &TestFunction,
    statistic: &S,
    samples: u64,
    rng: &mut R,
) -> Result<ComplexMc, VerifyError>
where
    S: Fn(&FluctuationField) -> f64,
    R: Rng + ?Sized,
{
    if samples < 2 {
        return Err(VerifyError::BadParameter(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    if n_sites < 2 {
        return Err(VerifyError::BadParameter(format!(
            "need at least 2 sites, got {n_sites}"
        )));
    }
    let law = GrandCanonicalLaw::at_density(rate, density)?;
    let sampler = CanonicalSampler::new(&law, n_sites, density)?;
    let n = n_sites as f64;
    let weights = phi.hat_weights(n_sites)?;
    // Moving one particle across the bond (i, i+1) shifts the single height
    // node i+1 by ∓1/√N, so the pairing phase moves by ∓w(i+1)/(N·√N).
    let coef: Vec<f64> = weights.iter().map(|w| w / (n * n.sqrt())).collect();
    let edge_scale = n * n / 2.0;

    let mut re = Accumulator::new();
    let mut im = Accumulator::new();
    for _ in 0..samples {
        let occ = sampler.sample(rng);
        let u = occ.height_field();
        let f = statistic(&u);
        let y: f64 = u.values().iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>() / n;
        let psi = Complex64::new(0.0, y).exp();
        let mut action = Complex64::new(0.0, 0.0);
        for (i, &c) in occ.counts().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let tau = rate.tau(u64::from(c));
            if i + 1 < n_sites {
                action += (Complex64::new(0.0, -coef[i + 1]).exp() - 1.0).scale(tau);
            }
            if i > 0 {
                action += (Complex64::new(0.0, coef[i]).exp() - 1.0).scale(tau);
            }
        }
        let value = (psi * action).scale(edge_scale * f);
        re.push(value.re);
        im.push(value.im);
    }
    Ok(ComplexMc::from_parts(&re, &im))
}

/// Drift and noise coefficients of the height-fluctuation limit at the
/// chain's grand-canonical moments: `c = Cov(n,τ)/(2·Var n)`, `σ² = E[τ]`.
pub fn zrp_continuum_coefficients(moments: &Moments) -> (f64, f64) {
    (moments.rho / (2.0 * moments.alpha), moments.tau_bar.sqrt())
}

/// One comparison row: a discrete pairing against its continuum counterpart.
#[derive(Debug, Clone)]
pub struct SigmaRow {
    pub label: String,
    pub discrete: ComplexMc,
    pub continuum: ComplexMc,
}

impl SigmaRow {
    /// Absolute gap `|discrete − continuum|`.
    pub fn gap(&self) -> f64 {
        (self.discrete.value - self.continuum.value).norm()
    }

    /// Euclidean combination of all four standard errors.
    pub fn combined_se(&self) -> f64 {
        self.discrete.combined_se().hypot(self.continuum.combined_se())
    }

    /// Whether the two sides agree within `k` combined standard errors,
    /// with an absolute floor for exact-versus-exact comparisons.
    pub fn within(&self, k: f64, floor: f64) -> bool {
        self.gap() <= k * self.combined_se() + floor
    }
}

/// A stack of comparison rows with a plain-text table rendering.
#[derive(Debug, Clone, Default)]
pub struct SigmaConvergenceReport {
    pub rows: Vec<SigmaRow>,
}

impl SigmaConvergenceReport {
    pub fn all_within(&self, k: f64, floor: f64) -> bool {
        self.rows.iter().all(|r| r.within(k, floor))
    }

    pub fn worst_pull(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let se = r.combined_se();
                if se > 0.0 {
                    r.gap() / se
                } else if r.gap() > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for SigmaConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<38} {:>22} {:>22} {:>10} {:>8}",
            "row", "discrete", "continuum", "gap", "gap/se"
        )?;
        for row in &self.rows {
            let se = row.combined_se();
            let pull = if se > 0.0 { format!("{:.2}", row.gap() / se) } else { "-".into() };
            writeln!(
                f,
                "{:<38} {:>22} {:>22} {:>10.3e} {:>8}",
                row.label,
                format!("{:+.4}{:+.4}i", row.discrete.value.re, row.discrete.value.im),
                format!("{:+.4}{:+.4}i", row.continuum.value.re, row.continuum.value.im),
                row.gap(),
                pull
            )?;
        }
        Ok(())
    }
}

/// Sizes and budgets for the ordered-pair convergence report.
#[derive(Debug, Clone)]
pub struct ReflectedReportConfig {
    /// Sizes verified by full enumeration.
    pub exact_sizes: Vec<u32>,
    /// `(2N, samples)` pairs verified by stationary Monte Carlo.
    pub mc_sizes: Vec<(u32, u64)>,
    pub oracle: PairSigmaConfig,
    pub seed: u64,
}

impl Default for ReflectedReportConfig {
    fn default() -> Self {
        ReflectedReportConfig {
            exact_sizes: vec![4, 8],
            mc_sizes: vec![(64, 40_000), (256, 40_000)],
            oracle: PairSigmaConfig {
                grid: 64,
                bulk_samples: 20_000,
                node_samples: 4_000,
                quad_nodes: 12,
            },
            seed: 7,
        }
    }
}

/// Builds the pair report: one `total`/`bulk`/`contact` row triple per size,
/// all compared against a single continuum evaluation.
pub fn reflected_sigma_report<S>(
    phi_v: &TestFunction,
    phi_w: &TestFunction,
    statistic: &S,
    cfg: &ReflectedReportConfig,
) -> Result<SigmaConvergenceReport, VerifyError>
where
    S: Fn(&FluctuationField, &FluctuationField) -> f64,
{
    let mut rng = stream(cfg.seed, "sigma-report-pair-oracle", 0);
    let continuum = sigma_limit_pair(statistic, phi_v, phi_w, &cfg.oracle, &mut rng)?;
    let cont_total = ComplexMc::from_estimate(&continuum.total);
    let cont_bulk = ComplexMc::from_estimate(&continuum.bulk);
    let cont_boundary = ComplexMc::from_estimate(&continuum.boundary);

    let mut rows = Vec::new();
    for &two_n in &cfg.exact_sizes {
        let g = reflected_generator(two_n)?;
        let exact = reflected_sigma_exact(&g, phi_v, phi_w, statistic)?;
        rows.push(SigmaRow {
            label: format!("pair 2N={two_n} exact / total"),
            discrete: ComplexMc::exact(exact.total),
            continuum: cont_total,
        });
        rows.push(SigmaRow {
            label: format!("pair 2N={two_n} exact / bulk"),
            discrete: ComplexMc::exact(exact.bulk),
            continuum: cont_bulk,
        });
        rows.push(SigmaRow {
            label: format!("pair 2N={two_n} exact / contact"),
            discrete: ComplexMc::exact(exact.reflection),
            continuum: cont_boundary,
        });
    }
    for (replica, &(two_n, samples)) in cfg.mc_sizes.iter().enumerate() {
        let mut rng = stream(cfg.seed, "sigma-report-pair-mc", replica as u64);
        let mc = reflected_sigma_mc(two_n, phi_v, phi_w, statistic, samples, &mut rng)?;
        rows.push(SigmaRow {
            label: format!("pair 2N={two_n} mc / total"),
            discrete: mc.total,
            continuum: cont_total,
        });
        rows.push(SigmaRow {
            label: format!("pair 2N={two_n} mc / bulk"),
            discrete: mc.bulk,
            continuum: cont_bulk,
        });
        rows.push(SigmaRow {
            label: format!("pair 2N={two_n} mc / contact"),
            discrete: mc.reflection,
            continuum: cont_boundary,
        });
    }
    Ok(SigmaConvergenceReport { rows })
}

/// Sizes and budgets for the particle-chain convergence report (linear rate).
#[derive(Debug, Clone)]
pub struct ZrpReportConfig {
    /// Sites of the enumerated chains; the particle number is `⌊N·n̄⌋`.
    pub exact_sizes: Vec<usize>,
    /// `(sites, samples)` chains verified by canonical Monte Carlo.
    pub mc_sizes: Vec<(usize, u64)>,
    pub density: f64,
    pub grid: usize,
    pub continuum_samples: u64,
    pub seed: u64,
}

impl Default for ZrpReportConfig {
    fn default() -> Self {
        ZrpReportConfig {
            exact_sizes: vec![4, 5],
            mc_sizes: vec![(64, 40_000)],
            density: 1.0,
            grid: 64,
            continuum_samples: 40_000,
            seed: 7,
        }
    }
}

/// Builds the chain report for the linear expulsion rate: exact rows on
/// enumerated chains, Monte Carlo rows on larger ones, all against the
/// continuum estimate at the matching drift and noise coefficients.
pub fn zrp_sigma_report<S>(
    phi: &TestFunction,
    statistic: &S,
    cfg: &ZrpReportConfig,
) -> Result<SigmaConvergenceReport, VerifyError>
where
    S: Fn(&FluctuationField) -> f64,
{
    let rate = RateFunction::linear();
    let law = GrandCanonicalLaw::at_density(&rate, cfg.density)?;
    let (c, sigma) = zrp_continuum_coefficients(&law.moments());
    let mut rng = stream(cfg.seed, "sigma-report-zrp-oracle", 0);
    let continuum = sigma_limit_zrp(
        statistic,
        phi,
        c,
        sigma,
        cfg.grid,
        cfg.continuum_samples,
        &mut rng,
    )?;
    let cont_total = ComplexMc::from_estimate(&continuum.total);

    let mut rows = Vec::new();
    for &n_sites in &cfg.exact_sizes {
        let particles = (n_sites as f64 * cfg.density).floor() as u64;
        let g = zrp_generator(n_sites, particles, &linear_tau(particles))?;
        let value = sigma_pairing_exact(
            &g,
            |e| match e {
                Embedding::Single(u) => statistic(u),
                Embedding::Pair(..) => unreachable!("chain embeddings are single fields"),
            },
            &PsiPairing::Single(phi),
        )?;
        rows.push(SigmaRow {
            label: format!("chain N={n_sites} exact / total"),
            discrete: ComplexMc::exact(value),
            continuum: cont_total,
        });
    }
    for (replica, &(n_sites, samples)) in cfg.mc_sizes.iter().enumerate() {
        let mut rng = stream(cfg.seed, "sigma-report-zrp-mc", replica as u64);
        let mc = zrp_sigma_mc(n_sites, cfg.density, &rate, phi, statistic, samples, &mut rng)?;
        rows.push(SigmaRow {
            label: format!("chain N={n_sites} mc / total"),
            discrete: mc,
            continuum: cont_total,
        });
    }
    Ok(SigmaConvergenceReport { rows })
}
