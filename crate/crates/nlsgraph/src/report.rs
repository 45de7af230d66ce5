use nlsgraph_core::closed_forms::{halfsoliton_energy, soliton_energy};
use nlsgraph_core::critical::{ProfileRow, Regime};
use nlsgraph_core::minimize::{level_pinching_check, RunRecord, SweepRow};
use nlsgraph_core::topology::classify_case;
use nlsgraph_core::{GraphFunction, GroundStateResult, MetricGraph, RunStatus, SolverConfig, TopologyReport};
use serde::Serialize;

use crate::error::Result;

/// Allowance above the soliton level for the escape signature.
pub const SIGNATURE_TOLERANCE: f64 = 2e-4;

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub graph: String,
    pub p: f64,
    pub mu: f64,
    pub topology: TopologyReport,
    pub soliton_energy: f64,
    pub halfsoliton_energy: f64,
    pub energy: f64,
    pub interpolant_energy: f64,
    pub mass: f64,
    pub omega: f64,
    pub grad_residual: f64,
    pub kirchhoff_max_residual: f64,
    pub iterations: usize,
    pub status: RunStatus,
    pub escaped: bool,
    /// Energy between the half-soliton and soliton levels.
    pub level_pinching: bool,
    /// Energy at the soliton level with the mass running off along a
    /// halfline: the numerical picture of a minimizing sequence that is lost.
    pub nonexistence_signature: bool,
    pub init: String,
    pub trace: Vec<RunRecord>,
    pub config: SolverConfig,
}

impl SolveReport {
    pub fn new(label: &str, g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig, r: &GroundStateResult) -> Result<Self> {
        let level = soliton_energy(p, mu)?;
        Ok(SolveReport {
            graph: label.to_string(),
            p,
            mu,
            topology: classify_case(g)?,
            soliton_energy: level,
            halfsoliton_energy: halfsoliton_energy(p, mu)?,
            energy: r.energy,
            interpolant_energy: r.interpolant_energy,
            mass: r.mass,
            omega: r.omega,
            grad_residual: r.grad_residual,
            kirchhoff_max_residual: r.kirchhoff_max_residual,
            iterations: r.iterations,
            status: r.status,
            escaped: r.escaped,
            level_pinching: level_pinching_check(r, p, mu),
            nonexistence_signature: r.escaped && r.energy >= level - SIGNATURE_TOLERANCE,
            init: r.init.clone(),
            trace: r.trace.clone(),
            config: cfg.clone(),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub energy: f64,
    pub interpolant_energy: f64,
    pub status: RunStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompetitorReport {
    pub shape: String,
    pub graph: String,
    pub p: f64,
    pub mu: f64,
    pub mass: f64,
    pub energy: f64,
    pub soliton_energy: f64,
    /// `energy - soliton_energy`; negative when the competitor wins.
    pub margin: f64,
    pub vertex_values: Vec<(String, f64)>,
    pub flow: Option<FlowSummary>,
}

impl CompetitorReport {
    pub fn new(shape: &str, label: &str, p: f64, mu: f64, u: &GraphFunction) -> Result<Self> {
        let level = soliton_energy(p, mu)?;
        let e = u.energy(p).total;
        let base = u.mesh().graph().base();
        let vertex_values = base
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.at_infinity)
            .map(|(i, v)| (v.id.clone(), u.vertex_value(i)))
            .collect();
        Ok(CompetitorReport {
            shape: shape.to_string(),
            graph: label.to_string(),
            p,
            mu,
            mass: u.mass(),
            energy: e,
            soliton_energy: level,
            margin: e - level,
            vertex_values,
            flow: None,
        })
    }
}

/// Flat CSV record for sweeps.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCsvRow {
    pub param: f64,
    pub energy: Option<f64>,
    pub omega: Option<f64>,
    pub status: String,
    pub iterations: usize,
    pub interpolant_energy: Option<f64>,
    pub escaped: bool,
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        SweepCsvRow {
            param: r.param,
            energy: r.energy,
            omega: r.omega,
            status: match (&r.status, &r.error) {
                (Some(s), _) => s.as_str().to_string(),
                (None, Some(e)) => format!("ERROR: {e}"),
                (None, None) => String::from("ERROR"),
            },
            iterations: r.iterations,
            interpolant_energy: r.interpolant_energy,
            escaped: r.escaped,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileCsvRow {
    pub mu: f64,
    pub energy: f64,
    pub status: &'static str,
    pub regime: &'static str,
    pub energy_refined: Option<f64>,
    pub iterations: usize,
}

impl From<&ProfileRow> for ProfileCsvRow {
    fn from(r: &ProfileRow) -> Self {
        ProfileCsvRow {
            mu: r.mu,
            energy: r.energy,
            status: r.status.as_str(),
            regime: r.regime.as_str(),
            energy_refined: r.energy_refined,
            iterations: r.iterations,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileReport {
    pub graph: String,
    pub topology: TopologyReport,
    pub mu: f64,
    pub energy: f64,
    pub status: RunStatus,
    pub regime: Regime,
    pub energy_refined: Option<f64>,
    pub iterations: usize,
}
