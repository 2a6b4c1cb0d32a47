use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_CAP: usize = 10_000_000;
pub const DELTA_RANGE: (f64, f64) = (1e-4, 1e-1);
pub const DEFAULT_OUT: &str = "bundlemin-out";

/// Run configuration as read from `--config`. Every field may be
/// overridden on the command line.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub construction: Option<String>,
    /// Parameter overrides for the construction.
    pub params: Option<serde_json::Value>,
    /// Explicit system instead of a named construction.
    pub system: Option<serde_json::Value>,
    pub delta: Option<f64>,
    pub transient: Option<usize>,
    pub steps: Option<usize>,
    pub probes: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Starting point in `base|edge|t` form.
    pub start: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Effective settings after merging config and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub delta: f64,
    pub transient: usize,
    pub steps: usize,
    pub probes: usize,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn step_cap() -> Result<usize, CliError> {
    match std::env::var("BUNDLEMIN_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Config(format!("BUNDLEMIN_CAP={v:?} is not a step count"))),
        Err(_) => Ok(DEFAULT_CAP),
    }
}

impl Settings {
    pub fn resolve(cfg: &RunConfig, delta: Option<f64>, steps: Option<usize>, seed: Option<u64>, out: Option<PathBuf>) -> Result<Self, CliError> {
        let s = Settings {
            delta: delta.or(cfg.delta).unwrap_or(0.02),
            transient: cfg.transient.unwrap_or(100),
            steps: steps.or(cfg.steps).unwrap_or(100_000),
            probes: cfg.probes.unwrap_or(100),
            seed: seed.or(cfg.seed).unwrap_or(0),
            out: out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        };
        let (lo, hi) = DELTA_RANGE;
        if !(s.delta >= lo && s.delta <= hi) {
            return Err(CliError::Config(format!("delta {} outside [{lo}, {hi}]", s.delta)));
        }
        if s.steps == 0 {
            return Err(CliError::Config("steps must be positive".into()));
        }
        let cap = step_cap()?;
        if s.transient + s.steps > cap {
            return Err(CliError::Cap { requested: s.transient + s.steps, cap });
        }
        Ok(s)
    }
}
