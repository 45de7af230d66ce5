//! Scenario files: named runs with optional assertions on the report.
//!
//! ```json
//! {"scenarios": [{
//!     "name": "line_p4",
//!     "description": "...",
//!     "graph": {"catalogue": "line"},
//!     "p": 4, "mu": 1,
//!     "config": {"h": 0.01},
//!     "expected": {"energy": {"min": -0.01047, "max": -0.01037}}
//! }]}
//! ```
//!
//! A graph is given by catalogue name, by file (relative to the scenario
//! file) or inline. The mass is a number or a multiple of one of the two
//! critical masses.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use nlsgraph_core::closed_forms::critical_masses;
use nlsgraph_core::critical::{self, Regime};
use nlsgraph_core::graph::{build_graph, GraphDescription};
use nlsgraph_core::surgery::{self, CompetitorShape};
use nlsgraph_core::topology::classify_case;
use nlsgraph_core::{CaseLabel, MetricGraph, RunStatus};
use serde::{Deserialize, Serialize};

use crate::catalogue;
use crate::error::{CliError, Result};
use crate::io;
use crate::overrides::ConfigOverrides;
use crate::parallel;
use crate::report::{CompetitorReport, ProfileCsvRow, ProfileReport, SolveReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphRef {
    Catalogue(String),
    File(PathBuf),
    Inline(GraphDescription),
}

impl GraphRef {
    pub fn label(&self) -> String {
        match self {
            GraphRef::Catalogue(n) => n.clone(),
            GraphRef::File(p) => p.display().to_string(),
            GraphRef::Inline(_) => String::from("inline"),
        }
    }

    pub fn load(&self, base_dir: &Path) -> Result<MetricGraph> {
        match self {
            GraphRef::Catalogue(n) => catalogue::resolve(n),
            GraphRef::File(p) => io::read_graph(&base_dir.join(p)),
            GraphRef::Inline(d) => build_graph(d).map_err(CliError::InvalidGraph),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMass {
    Line,
    Halfline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassSpec {
    Value(f64),
    Relative { times: f64, of: CriticalMass },
}

impl MassSpec {
    pub fn value(self) -> f64 {
        let (line, half) = critical_masses();
        match self {
            MassSpec::Value(x) => x,
            MassSpec::Relative { times, of: CriticalMass::Line } => times * line,
            MassSpec::Relative { times, of: CriticalMass::Halfline } => times * half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    #[default]
    Solve,
    /// Energy level and regime at one mass for `p = 6`.
    Profile6,
    Competitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bracket {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

impl Bracket {
    pub fn check(&self, field: &str, x: f64, failures: &mut Vec<String>) {
        if let Some(lo) = self.min {
            if !(x >= lo) {
                failures.push(format!("{field} = {x:e} below {lo:e}"));
            }
        }
        if let Some(hi) = self.max {
            if !(x <= hi) {
                failures.push(format!("{field} = {x:e} above {hi:e}"));
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default)]
    pub energy: Option<Bracket>,
    #[serde(default)]
    pub interpolant_energy: Option<Bracket>,
    #[serde(default)]
    pub mass: Option<Bracket>,
    #[serde(default)]
    pub case_label: Option<CaseLabel>,
    #[serde(default)]
    pub status: Option<RunStatus>,
    #[serde(default)]
    pub escaped: Option<bool>,
    #[serde(default)]
    pub level_pinching: Option<bool>,
    #[serde(default)]
    pub nonexistence_signature: Option<bool>,
    #[serde(default)]
    pub regime: Option<Regime>,
}

impl Expected {
    /// Field names this assertion set refers to.
    fn fields(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut add = |set: bool, name| {
            if set {
                out.push(name)
            }
        };
        add(self.energy.is_some(), "energy");
        add(self.interpolant_energy.is_some(), "interpolant_energy");
        add(self.mass.is_some(), "mass");
        add(self.case_label.is_some(), "case_label");
        add(self.status.is_some(), "status");
        add(self.escaped.is_some(), "escaped");
        add(self.level_pinching.is_some(), "level_pinching");
        add(self.nonexistence_signature.is_some(), "nonexistence_signature");
        add(self.regime.is_some(), "regime");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub graph: GraphRef,
    #[serde(default)]
    pub task: Task,
    /// Required for the competitor task.
    #[serde(default)]
    pub shape: Option<String>,
    pub p: f64,
    pub mu: MassSpec,
    #[serde(default)]
    pub config: ConfigOverrides,
    #[serde(default)]
    pub expected: Option<Expected>,
}

impl Scenario {
    fn reported_fields(&self) -> &'static [&'static str] {
        match self.task {
            Task::Solve => &[
                "energy",
                "interpolant_energy",
                "mass",
                "case_label",
                "status",
                "escaped",
                "level_pinching",
                "nonexistence_signature",
            ],
            Task::Profile6 => &["energy", "case_label", "status", "regime"],
            Task::Competitor => &["energy", "mass", "case_label"],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Parse(format!("scenario name `{}` must be a plain identifier", self.name)));
        }
        if let Some(exp) = &self.expected {
            let allowed = self.reported_fields();
            if let Some(f) = exp.fields().into_iter().find(|f| !allowed.contains(f)) {
                return Err(CliError::Parse(format!(
                    "scenario `{}`: `{f}` is not reported by this task",
                    self.name
                )));
            }
        }
        match (self.task, &self.shape) {
            (Task::Competitor, None) => Err(CliError::Parse(format!("scenario `{}` needs a shape", self.name))),
            (Task::Competitor, Some(s)) if CompetitorShape::parse(s).is_none() => {
                Err(CliError::Parse(format!("scenario `{}`: unknown shape `{s}`", self.name)))
            }
            (Task::Profile6, _) if self.p != 6.0 => {
                Err(CliError::Parse(format!("scenario `{}`: profile6 needs p = 6", self.name)))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenarios: Vec<Scenario>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| CliError::Parse(format!("scenario file: {e}")))?;
        let mut seen = BTreeSet::new();
        for s in &file.scenarios {
            s.validate()?;
            if !seen.insert(s.name.as_str()) {
                return Err(CliError::Parse(format!("duplicate scenario name `{}`", s.name)));
            }
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&io::read_text(path)?)
    }
}

/// Outcome of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub passed: bool,
    pub failures: Vec<String>,
    /// Set when the run itself failed.
    pub error: Option<String>,
}

/// Runs one scenario, writing `report.json` and `result.csv` into `out`.
/// `overrides` wins over the scenario's own config.
pub fn run_scenario(s: &Scenario, base_dir: &Path, out: &Path, overrides: &ConfigOverrides) -> Result<ScenarioOutcome> {
    s.validate()?;
    let g = s.graph.load(base_dir)?;
    let label = s.graph.label();
    let mu = s.mu.value();
    let cfg = overrides.or(&s.config).config(s.p, mu);
    let case_label = classify_case(&g)?.case_label;
    let exp = s.expected.clone().unwrap_or_default();
    let mut failures = Vec::new();
    let report_path = out.join("report.json");
    let csv_path = out.join("result.csv");
    match s.task {
        Task::Solve => {
            let r = parallel::ground_state_par(&g, s.p, mu, &cfg, Vec::new())?;
            let rep = SolveReport::new(&label, &g, s.p, mu, &cfg, &r)?;
            io::write_json(&report_path, &rep)?;
            io::write_function(&csv_path, &r.u)?;
            check_common(&exp, rep.energy, Some(rep.mass), case_label, &mut failures);
            if let Some(b) = exp.interpolant_energy {
                b.check("interpolant_energy", rep.interpolant_energy, &mut failures);
            }
            check_eq("status", exp.status, rep.status, &mut failures);
            check_eq("escaped", exp.escaped, rep.escaped, &mut failures);
            check_eq("level_pinching", exp.level_pinching, rep.level_pinching, &mut failures);
            check_eq(
                "nonexistence_signature",
                exp.nonexistence_signature,
                rep.nonexistence_signature,
                &mut failures,
            );
        }
        Task::Profile6 => {
            let row = critical::profile_point(&g, mu, &cfg)?;
            let rep = ProfileReport {
                graph: label,
                topology: classify_case(&g)?,
                mu,
                energy: row.energy,
                status: row.status,
                regime: row.regime,
                energy_refined: row.energy_refined,
                iterations: row.iterations,
            };
            io::write_json(&report_path, &rep)?;
            io::write_text(&csv_path, &io::csv_string(&[ProfileCsvRow::from(&row)])?)?;
            check_common(&exp, rep.energy, None, case_label, &mut failures);
            check_eq("status", exp.status, rep.status, &mut failures);
            check_eq("regime", exp.regime, rep.regime, &mut failures);
        }
        Task::Competitor => {
            let shape_name = s.shape.as_deref().unwrap_or_default();
            let shape = CompetitorShape::parse(shape_name).expect("validated");
            let u = surgery::competitor(shape, &g, s.p, mu, &cfg)?;
            let rep = CompetitorReport::new(shape.as_str(), &label, s.p, mu, &u)?;
            io::write_json(&report_path, &rep)?;
            io::write_function(&csv_path, &u)?;
            check_common(&exp, rep.energy, Some(rep.mass), case_label, &mut failures);
        }
    }
    Ok(ScenarioOutcome {
        name: s.name.clone(),
        passed: failures.is_empty(),
        failures,
        error: None,
    })
}

fn check_common(exp: &Expected, energy: f64, mass: Option<f64>, label: CaseLabel, failures: &mut Vec<String>) {
    if let Some(b) = exp.energy {
        b.check("energy", energy, failures);
    }
    if let (Some(b), Some(m)) = (exp.mass, mass) {
        b.check("mass", m, failures);
    }
    check_eq("case_label", exp.case_label, label, failures);
}

fn check_eq<T: PartialEq + std::fmt::Debug>(field: &str, want: Option<T>, got: T, failures: &mut Vec<String>) {
    if let Some(w) = want {
        if w != got {
            failures.push(format!("{field} = {got:?}, expected {w:?}"));
        }
    }
}

/// Runs every scenario (or the one named `only`) into `out/<name>/`, then
/// writes `out/summary.json`. Solver failures are recorded per scenario.
pub fn run_file(
    path: &Path,
    out: &Path,
    only: Option<&str>,
    overrides: &ConfigOverrides,
) -> Result<Vec<ScenarioOutcome>> {
    let file = ScenarioFile::read(path)?;
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let selected: Vec<&Scenario> = file
        .scenarios
        .iter()
        .filter(|s| only.map_or(true, |n| s.name == n))
        .collect();
    if selected.is_empty() {
        return Err(CliError::Usage(format!("no scenario named `{}`", only.unwrap_or_default())));
    }
    let mut outcomes = Vec::with_capacity(selected.len());
    for s in selected {
        let outcome = match run_scenario(s, base_dir, &out.join(&s.name), overrides) {
            Ok(o) => o,
            Err(e @ (CliError::Solver(_) | CliError::InvalidGraph(_))) => ScenarioOutcome {
                name: s.name.clone(),
                passed: false,
                failures: Vec::new(),
                error: Some(format!("{}: {e}", e.code())),
            },
            Err(e) => return Err(e),
        };
        outcomes.push(outcome);
    }
    io::write_json(&out.join("summary.json"), &outcomes)?;
    Ok(outcomes)
}

/// Exit status for a finished batch: solver failures first, then
/// assertion failures.
pub fn batch_status(outcomes: &[ScenarioOutcome]) -> Result<()> {
    let errored: Vec<&str> = outcomes.iter().filter(|o| o.error.is_some()).map(|o| o.name.as_str()).collect();
    if !errored.is_empty() {
        return Err(CliError::Solver(format!("scenarios could not be run: {}", errored.join(", "))));
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(format!("scenarios failed: {}", failed.join(", "))))
    }
}
