use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rost_barrier::measures::MeasureSpec;
use rost_barrier::solver::{BarrierProblem, Grid, SolverConfig};
use rost_barrier::verify::MCConfig;
use rost_barrier::Measure;

use crate::Failure;

/// Acceptance gates applied by `verify`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Gates {
    /// Sup distance between solver and lattice boundaries on `[0.1 T, 0.9 T]`;
    /// `max(0.05, 3 sqrt(h))` when absent.
    pub oracle_tol: Option<f64>,
    pub ks_max: f64,
    /// Allowed deviation of the censoring fraction, in binomial standard errors.
    pub censor_se_max: f64,
}

impl Default for Gates {
    fn default() -> Self {
        Self { oracle_tol: None, ks_max: 0.02, censor_se_max: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mu: MeasureSpec,
    pub nu: MeasureSpec,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N")]
    pub steps: usize,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub mc: MCConfig,
    #[serde(default)]
    pub gates: Gates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), Failure> {
        self.grid()?;
        self.solver.validate().map_err(|e| Failure::config(e.to_string()))?;
        if !(self.mc.dt.is_finite() && self.mc.dt > 0.0) || self.mc.n_paths == 0 || self.mc.first_segment_refinement == 0 {
            return Err(Failure::config("mc: dt must be positive, n_paths and first_segment_refinement at least 1"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, Failure> {
        Grid::new(self.horizon, self.steps).map_err(|e| Failure::config(e.to_string()))
    }

    pub fn problem(&self) -> Result<BarrierProblem, Failure> {
        let mu = Measure::from_spec(&self.mu).map_err(|e| Failure::config(format!("mu: {e}")))?;
        let nu = Measure::from_spec(&self.nu).map_err(|e| Failure::config(format!("nu: {e}")))?;
        BarrierProblem::new(mu, nu).map_err(|e| Failure::config(e.to_string()))
    }
}
