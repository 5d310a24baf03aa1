//! Experiment runner: evolves the selected model over a fixed horizon,
//! samples spatial probes at evenly spaced times, and emits
//! `config.resolved`, one CSV per probe, and `report.json`.
//!
//! Replicas are processed sequentially in index order and every stream is
//! derived from (seed, purpose, replica), so outputs depend only on the
//! resolved configuration — rerunning a config byte-reproduces `report.json`.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use fluctua_core::rng::stream;
use fluctua_core::stats::Accumulator;
use fluctua_core::FluctuationField;
use fluctua_gradphi::{evolve, gaussian_equilibrium, GradPhiState, Potential};
use fluctua_reflected::{sample_pair, ReflectedDynamics};
use fluctua_zrp::{CanonicalSampler, GrandCanonicalLaw, RateFunction, ZrpDynamics};

use crate::config::{ExperimentConfig, ModelKind};
use crate::emit::{csv_float, Artifacts};

/// Per-probe pooled summary (over all replicas and observation times).
#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub location: f64,
    pub file: String,
    pub mean: f64,
    pub se: f64,
    pub n: u64,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub model: &'static str,
    pub size: u32,
    pub horizon: f64,
    pub replicas: u32,
    pub checkpoints: u32,
    pub seed: u64,
    pub events: u64,
    pub probes: Vec<ProbeSummary>,
}

/// One replica's trajectory, sampled at `checkpoints + 1` times (t = 0
/// included): `values[j][p]` is probe `p` at the j-th observation time.
struct Trajectory {
    values: Vec<Vec<f64>>,
    events: u64,
}

fn observe(field: &FluctuationField, probes: &[f64]) -> Vec<f64> {
    probes.iter().map(|&s| field.eval(s)).collect()
}

fn reflected_trajectory(cfg: &ExperimentConfig, replica: u32) -> Result<Trajectory> {
    let mut init_rng = stream(cfg.seed, "run-reflected-init", u64::from(replica));
    let pair = sample_pair(cfg.size, &mut init_rng)?;
    let mut dynamics = ReflectedDynamics::new(pair);
    let mut rng = stream(cfg.seed, "run-reflected", u64::from(replica));
    let dt = cfg.horizon / f64::from(cfg.checkpoints);
    let mut values = Vec::with_capacity(cfg.checkpoints as usize + 1);
    for j in 0..=cfg.checkpoints {
        if j > 0 {
            dynamics.run_for(dt, &mut rng);
        }
        let (s_field, _) = dynamics.state().sum_diff();
        values.push(observe(&s_field, &cfg.probes));
    }
    Ok(Trajectory { values, events: dynamics.events() })
}

fn zrp_trajectory(cfg: &ExperimentConfig, replica: u32) -> Result<Trajectory> {
    let rate = RateFunction::linear();
    let law = GrandCanonicalLaw::at_density(&rate, cfg.density)?;
    let sampler = CanonicalSampler::new(&law, cfg.size as usize, cfg.density)?;
    let mut init_rng = stream(cfg.seed, "run-zrp-init", u64::from(replica));
    let occ = sampler.sample(&mut init_rng);
    let mut dynamics = ZrpDynamics::new(occ, rate);
    let mut rng = stream(cfg.seed, "run-zrp", u64::from(replica));
    let dt = cfg.horizon / f64::from(cfg.checkpoints);
    let mut values = Vec::with_capacity(cfg.checkpoints as usize + 1);
    let mut events = 0u64;
    for j in 0..=cfg.checkpoints {
        if j > 0 {
            events += dynamics.run_for(dt, &mut rng);
        }
        values.push(observe(&dynamics.occupation().height_field(), &cfg.probes));
    }
    Ok(Trajectory { values, events })
}

fn gradphi_trajectory(cfg: &ExperimentConfig, replica: u32) -> Result<Trajectory> {
    let mut init_rng = stream(cfg.seed, "run-gradphi-init", u64::from(replica));
    // Hard wall runs the integer potential from the flat interface; without a
    // wall the quadratic model starts from its exact Gaussian equilibrium.
    let (mut state, potential) = if cfg.wall {
        (GradPhiState::flat(cfg.size as usize, true)?, Potential::integer_abs(cfg.beta)?)
    } else {
        (gaussian_equilibrium(cfg.size as usize, &mut init_rng)?, Potential::quadratic())
    };
    let mut rng = stream(cfg.seed, "run-gradphi", u64::from(replica));
    let dt = cfg.horizon / f64::from(cfg.checkpoints);
    let mut values = Vec::with_capacity(cfg.checkpoints as usize + 1);
    let mut events = 0u64;
    for j in 0..=cfg.checkpoints {
        if j > 0 {
            events += evolve(&mut state, dt, &potential, &mut rng)?;
        }
        values.push(observe(&state.fluctuation_field(), &cfg.probes));
    }
    Ok(Trajectory { values, events })
}

/// Runs the experiment and writes all artifacts under `cfg.output`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let out: &Path = cfg.output.as_path();
    let mut artifacts = Artifacts::new();
    artifacts.write_text(&out.join("config.resolved"), &cfg.render())?;

    let mut trajectories = Vec::with_capacity(cfg.replicas as usize);
    for replica in 0..cfg.replicas {
        let t = match cfg.kind {
            ModelKind::Reflected => reflected_trajectory(cfg, replica),
            ModelKind::Zrp => zrp_trajectory(cfg, replica),
            ModelKind::GradPhi => gradphi_trajectory(cfg, replica),
        }
        .with_context(|| format!("replica {replica}"))?;
        trajectories.push(t);
    }

    let dt = cfg.horizon / f64::from(cfg.checkpoints);
    let mut probes = Vec::with_capacity(cfg.probes.len());
    for (p, &location) in cfg.probes.iter().enumerate() {
        let file = format!("probe_{p}.csv");
        let mut acc = Accumulator::new();
        let mut rows = Vec::new();
        for (r, t) in trajectories.iter().enumerate() {
            for (j, snapshot) in t.values.iter().enumerate() {
                let value = snapshot[p];
                acc.push(value);
                rows.push(format!("{},{r},{}", csv_float(j as f64 * dt), csv_float(value)));
            }
        }
        artifacts.write_csv(&out.join(&file), "time,replica,value", rows)?;
        probes.push(ProbeSummary {
            location,
            file,
            mean: acc.mean(),
            se: acc.se(),
            n: acc.count(),
        });
    }

    let report = RunReport {
        model: cfg.kind.as_str(),
        size: cfg.size,
        horizon: cfg.horizon,
        replicas: cfg.replicas,
        checkpoints: cfg.checkpoints,
        seed: cfg.seed,
        events: trajectories.iter().map(|t| t.events).sum(),
        probes,
    };
    artifacts.write_json(&out.join("report.json"), &report)?;
    artifacts.commit();
    Ok(report)
}
