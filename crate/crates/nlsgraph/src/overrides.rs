use clap::Args;
use nlsgraph_core::SolverConfig;
use serde::{Deserialize, Serialize};

/// Solver settings that replace the problem defaults when given. Shared by
/// the command line and scenario files.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// Length at which halflines are cut.
    #[arg(long = "truncation", value_name = "L")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_length: Option<f64>,
    /// Target grid spacing.
    #[arg(long = "h", value_name = "H")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_energy: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_residual: Option<f64>,
    /// Number of random restarts.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_cells: Option<usize>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump_width: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_floor: Option<f64>,
    /// Set from the common `--seed` flag on the command line.
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConfigOverrides {
    pub fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(x) = self.truncation_length {
            cfg.truncation_length = x;
        }
        if let Some(x) = self.h {
            cfg.h_target = x;
        }
        if let Some(x) = self.dt {
            cfg.dt = x;
            cfg.dt_max = cfg.dt_max.max(x);
        }
        if let Some(x) = self.max_iterations {
            cfg.max_iterations = x;
        }
        if let Some(x) = self.tol_energy {
            cfg.tol_energy = x;
        }
        if let Some(x) = self.tol_residual {
            cfg.tol_residual = x;
        }
        if let Some(x) = self.restarts {
            cfg.restarts = x;
        }
        if let Some(x) = self.min_cells {
            cfg.min_cells = x;
        }
        if self.bump_width.is_some() {
            cfg.bump_width = self.bump_width;
        }
        if let Some(x) = self.blowup_floor {
            cfg.blowup_energy_floor = x;
        }
        if let Some(x) = self.seed {
            cfg.seed = x;
        }
    }

    /// Problem defaults for `(p, mu)` with these overrides applied.
    pub fn config(&self, p: f64, mu: f64) -> SolverConfig {
        let mut cfg = SolverConfig::for_problem(p, mu);
        self.apply(&mut cfg);
        cfg
    }

    /// Fields set here win over `other`.
    pub fn or(&self, other: &ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            truncation_length: self.truncation_length.or(other.truncation_length),
            h: self.h.or(other.h),
            dt: self.dt.or(other.dt),
            max_iterations: self.max_iterations.or(other.max_iterations),
            tol_energy: self.tol_energy.or(other.tol_energy),
            tol_residual: self.tol_residual.or(other.tol_residual),
            restarts: self.restarts.or(other.restarts),
            min_cells: self.min_cells.or(other.min_cells),
            bump_width: self.bump_width.or(other.bump_width),
            blowup_floor: self.blowup_floor.or(other.blowup_floor),
            seed: self.seed.or(other.seed),
        }
    }
}
