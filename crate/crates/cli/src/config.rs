//! Experiment configuration: a flat `section.key = value` text format that
//! round-trips losslessly, plus the `FLUCTUA_SEED` override hook.
//!
//! Every key has a default, so the empty file is a valid configuration.
//! Unknown keys are rejected. Floating-point values are rendered with the
//! shortest representation that parses back to the same bits, which is what
//! makes `parse(render(c)) == c` exact.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

/// Which model an experiment drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Zrp,
    Reflected,
    GradPhi,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Zrp => "zrp",
            ModelKind::Reflected => "reflected",
            ModelKind::GradPhi => "gradphi",
        }
    }
}

impl FromStr for ModelKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zrp" => Ok(ModelKind::Zrp),
            "reflected" => Ok(ModelKind::Reflected),
            "gradphi" => Ok(ModelKind::GradPhi),
            other => Err(anyhow!("unknown model '{other}' (zrp|reflected|gradphi)")),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Acceptance-suite selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Algebraic checks only (exact integer/rational identities).
    Exact,
    /// Monte-Carlo checks with statistical tolerances.
    Statistical,
    /// Everything.
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Exact => "exact",
            Suite::Statistical => "statistical",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Suite::Exact),
            "statistical" => Ok(Suite::Statistical),
            "all" => Ok(Suite::All),
            other => Err(anyhow!("unknown suite '{other}' (exact|statistical|all)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sampling budget for the statistical acceptance criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    /// Reduced sample counts with widened tolerances (documented per
    /// criterion in the acceptance module) for quick turnaround.
    Small,
    /// The design-point sample counts.
    Full,
}

impl Budget {
    pub fn as_str(self) -> &'static str {
        match self {
            Budget::Small => "small",
            Budget::Full => "full",
        }
    }
}

impl FromStr for Budget {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Budget::Small),
            "full" => Ok(Budget::Full),
            other => Err(anyhow!("unknown budget '{other}' (small|full)")),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One experiment: model selection, run shape, seeding, and output location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Model to simulate.
    pub kind: ModelKind,
    /// Lattice size: `2N` for the interface pair, site count otherwise.
    pub size: u32,
    /// Particle density (zero-range only).
    pub density: f64,
    /// Inverse-temperature parameter of the integer interface potential.
    pub beta: f64,
    /// Hard wall at zero for the interface Gibbs sampler.
    pub wall: bool,
    /// Diffusive time horizon per replica.
    pub horizon: f64,
    /// Independent replicas.
    pub replicas: u32,
    /// Number of equally spaced observation times after t = 0.
    pub checkpoints: u32,
    /// Spatial probe locations in (0, 1).
    pub probes: Vec<f64>,
    /// Master seed; every RNG stream is derived from it.
    pub seed: u64,
    /// Output directory for artifacts.
    pub output: PathBuf,
    /// Acceptance-suite selector.
    pub suite: Suite,
    /// Acceptance sampling budget.
    pub budget: Budget,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ModelKind::Reflected,
            size: 32,
            density: 1.0,
            beta: std::f64::consts::LN_2,
            wall: true,
            horizon: 1.0,
            replicas: 4,
            checkpoints: 64,
            probes: vec![0.25, 0.5, 0.75],
            seed: 7,
            output: PathBuf::from("out"),
            suite: Suite::All,
            budget: Budget::Small,
        }
    }
}

impl ExperimentConfig {
    /// Parses the flat `section.key = value` format. Blank lines and lines
    /// starting with `#` are ignored; unknown keys and malformed values are
    /// errors. Keys not present keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'section.key = value'", lineno + 1))?;
            let key = key.trim();
            let value = value.trim();
            let ctx = || format!("line {}: key '{key}'", lineno + 1);
            match key {
                "model.kind" => cfg.kind = value.parse().with_context(ctx)?,
                "model.size" => cfg.size = value.parse().with_context(ctx)?,
                "model.density" => cfg.density = value.parse().with_context(ctx)?,
                "model.beta" => cfg.beta = value.parse().with_context(ctx)?,
                "model.wall" => cfg.wall = value.parse().with_context(ctx)?,
                "run.horizon" => cfg.horizon = value.parse().with_context(ctx)?,
                "run.replicas" => cfg.replicas = value.parse().with_context(ctx)?,
                "run.checkpoints" => cfg.checkpoints = value.parse().with_context(ctx)?,
                "run.probes" => {
                    cfg.probes = value
                        .split_whitespace()
                        .map(|p| p.parse::<f64>().map_err(|e| anyhow!("probe '{p}': {e}")))
                        .collect::<Result<Vec<f64>>>()
                        .with_context(ctx)?;
                }
                "run.seed" => cfg.seed = value.parse().with_context(ctx)?,
                "run.output" => cfg.output = PathBuf::from(value),
                "acceptance.suite" => cfg.suite = value.parse().with_context(ctx)?,
                "acceptance.budget" => cfg.budget = value.parse().with_context(ctx)?,
                other => bail!("line {}: unknown key '{other}'", lineno + 1),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Renders every key in a fixed order; `parse(render(c)) == c`.
    pub fn render(&self) -> String {
        let probes =
            self.probes.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        format!(
            "model.kind = {}\n\
             model.size = {}\n\
             model.density = {}\n\
             model.beta = {}\n\
             model.wall = {}\n\
             run.horizon = {}\n\
             run.replicas = {}\n\
             run.checkpoints = {}\n\
             run.probes = {}\n\
             run.seed = {}\n\
             run.output = {}\n\
             acceptance.suite = {}\n\
             acceptance.budget = {}\n",
            self.kind,
            self.size,
            self.density,
            self.beta,
            self.wall,
            self.horizon,
            self.replicas,
            self.checkpoints,
            probes,
            self.seed,
            self.output.display(),
            self.suite,
            self.budget,
        )
    }

    /// Applies the only environment override: `FLUCTUA_SEED` replaces the
    /// configured seed when present and well-formed.
    pub fn apply_env_seed(&mut self, env_seed: Option<&str>) -> Result<()> {
        if let Some(text) = env_seed {
            let seed: u64 = text
                .trim()
                .parse()
                .map_err(|e| anyhow!("FLUCTUA_SEED '{text}' is not a u64: {e}"))?;
            self.seed = seed;
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.size < 2 {
            bail!("model.size must be at least 2, got {}", self.size);
        }
        if self.kind == ModelKind::Reflected && self.size % 2 != 0 {
            bail!("model.size must be even for the interface pair, got {}", self.size);
        }
        if !(self.density > 0.0 && self.density.is_finite()) {
            bail!("model.density must be positive and finite, got {}", self.density);
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            bail!("model.beta must be positive and finite, got {}", self.beta);
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            bail!("run.horizon must be finite and nonnegative, got {}", self.horizon);
        }
        if self.replicas == 0 {
            bail!("run.replicas must be at least 1");
        }
        if self.checkpoints == 0 {
            bail!("run.checkpoints must be at least 1");
        }
        if self.probes.is_empty() {
            bail!("run.probes must list at least one location");
        }
        for &p in &self.probes {
            if !(p > 0.0 && p < 1.0) {
                bail!("probe locations must lie strictly inside (0,1), got {p}");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default_config() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::default();
        cfg.kind = ModelKind::Zrp;
        cfg.size = 64;
        cfg.density = 0.1 + 0.2; // deliberately not representable exactly
        cfg.beta = 1e-17;
        cfg.horizon = std::f64::consts::PI;
        cfg.probes = vec![0.125, 1.0 / 3.0, 0.8 + 1e-16];
        cfg.seed = u64::MAX;
        cfg.output = PathBuf::from("some/dir");
        cfg.suite = Suite::Statistical;
        cfg.budget = Budget::Full;
        let text = cfg.render();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, cfg);
        // a second render is byte-identical
        assert_eq!(back.render(), text);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# experiment\n\nmodel.kind = gradphi\n  model.size = 16  \n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.kind, ModelKind::GradPhi);
        assert_eq!(cfg.size, 16);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(ExperimentConfig::parse("model.flavour = odd").is_err());
        assert!(ExperimentConfig::parse("model.size = minus-two").is_err());
        assert!(ExperimentConfig::parse("run.probes = 0.5 1.5").is_err());
        assert!(ExperimentConfig::parse("model.kind = reflected\nmodel.size = 5").is_err());
        assert!(ExperimentConfig::parse("just words").is_err());
    }

    #[test]
    fn env_seed_overrides_and_rejects_garbage() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_env_seed(Some("123")).unwrap();
        assert_eq!(cfg.seed, 123);
        cfg.apply_env_seed(None).unwrap();
        assert_eq!(cfg.seed, 123);
        assert!(cfg.apply_env_seed(Some("not-a-number")).is_err());
    }
}
