//! Mass-constrained minimization of the NLS energy on truncated graphs.
//!
//! One run of the flow takes a descent direction, steps, clamps negative
//! values to zero and rescales to the target mass. The step is accepted only
//! if the energy does not increase; otherwise it is halved. The default
//! direction is the gradient in the `H¹`-type metric `K + σM`, projected onto
//! the tangent space of the mass sphere, which gives mesh-independent step
//! sizes. The pointwise lumped-`L²` direction is available as well.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::closed_forms::{self, halfsoliton_energy, soliton_energy};
use crate::error::{Error, Result};
use crate::function_space::{GraphFunction, Mesh};
use crate::graph::{MetricGraph, TruncatedGraph};
use crate::linsolve::ShiftedStiffness;
use crate::math::{self, sech};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "SCREAMING_SNAKE_CASE")
)]
pub enum InitStrategy {
    VertexBump,
    HalflineSoliton,
    EdgeUniform,
    Random,
}

impl InitStrategy {
    pub const ALL: [InitStrategy; 4] = [
        InitStrategy::VertexBump,
        InitStrategy::HalflineSoliton,
        InitStrategy::EdgeUniform,
        InitStrategy::Random,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "SCREAMING_SNAKE_CASE")
)]
pub enum RunStatus {
    Converged,
    MaxIter,
    UnboundedSuspected,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "CONVERGED",
            RunStatus::MaxIter => "MAX_ITER",
            RunStatus::UnboundedSuspected => "UNBOUNDED_SUSPECTED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum FlowMetric {
    /// Gradient with respect to `K + σM`, `σ` tracking the multiplier.
    Sobolev,
    /// Gradient with respect to the lumped mass matrix; needs `dt ~ h²`.
    LumpedL2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "snake_case")
)]
pub enum Descent {
    /// Steepest descent in the chosen metric.
    Gradient,
    /// Polak–Ribière conjugate directions in the chosen metric, restarted
    /// whenever they stop being descent directions.
    ConjugateGradient,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    pub truncation_length: f64,
    pub h_target: f64,
    /// Initial step of the flow.
    pub dt: f64,
    /// Largest step reached by doubling after accepted steps.
    pub dt_max: f64,
    pub descent: Descent,
    pub max_iterations: usize,
    pub tol_energy: f64,
    pub tol_residual: f64,
    pub restarts: usize,
    pub init_strategies: Vec<InitStrategy>,
    pub seed: u64,
    pub blowup_energy_floor: f64,
    pub metric: FlowMetric,
    /// Lower bound on cells per edge, so very short edges still resolve.
    pub min_cells: usize,
    /// Width of the initial bumps; `None` uses the soliton width.
    pub bump_width: Option<f64>,
    /// Lower bound for the shift `σ` in the Sobolev metric.
    pub sigma_min: f64,
}

impl SolverConfig {
    /// Defaults scaled to the soliton of mass `mu` (for `p = 6`, to unit
    /// width).
    pub fn for_problem(p: f64, mu: f64) -> Self {
        let (l, h, floor) = if p < 6.0 {
            let e = halfsoliton_energy(p, mu).unwrap_or(-1.0);
            (
                closed_forms::default_truncation(p, mu).unwrap_or(40.0),
                closed_forms::default_h(p, mu).unwrap_or(0.01),
                1e3 * e,
            )
        } else {
            (40.0, 0.01, -1e3)
        };
        SolverConfig {
            truncation_length: l,
            h_target: h,
            dt: 1.0,
            dt_max: 1e3,
            descent: Descent::ConjugateGradient,
            max_iterations: 20_000,
            tol_energy: 1e-10,
            tol_residual: 1e-5,
            restarts: 2,
            init_strategies: InitStrategy::ALL.to_vec(),
            seed: 0,
            blowup_energy_floor: floor,
            metric: FlowMetric::Sobolev,
            min_cells: 8,
            bump_width: None,
            sigma_min: 1e-4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_length > 0.0) {
            return Err(Error::InvalidConfig("truncation length must be positive"));
        }
        if !(self.h_target > 0.0) {
            return Err(Error::InvalidConfig("h_target must be positive"));
        }
        if !(self.dt > 0.0 && self.dt_max >= self.dt) {
            return Err(Error::InvalidConfig("dt must be positive"));
        }
        if !(self.tol_energy > 0.0 && self.tol_residual > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive"));
        }
        if !(self.sigma_min > 0.0) {
            return Err(Error::InvalidConfig("sigma_min must be positive"));
        }
        Ok(())
    }

    pub fn mesh(&self, g: &MetricGraph) -> Result<Arc<Mesh>> {
        self.validate()?;
        let tg = g.truncate(self.truncation_length)?;
        Mesh::with_min_cells(&tg, self.h_target, self.min_cells)
    }
}

/// Summary of one flow run inside a multi-start search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub init: String,
    pub energy: f64,
    pub status: RunStatus,
    pub iterations: usize,
    pub escaped: bool,
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub u: GraphFunction,
    pub energy: f64,
    /// See [`GraphFunction::interpolant_energy`].
    pub interpolant_energy: f64,
    pub mass: f64,
    pub omega: f64,
    pub grad_residual: f64,
    pub kirchhoff_max_residual: f64,
    pub iterations: usize,
    pub status: RunStatus,
    /// More than half of the mass sits on truncated halflines beyond a
    /// quarter of the truncation length.
    pub escaped: bool,
    /// Energy after every accepted step, starting from the initial guess.
    pub energy_history: Vec<f64>,
    /// Largest relative mass error seen after a renormalization.
    pub max_mass_drift: f64,
    pub init: String,
    /// All runs of a multi-start search (empty for a single flow).
    pub trace: Vec<RunRecord>,
}

impl GroundStateResult {
    pub fn record(&self) -> RunRecord {
        RunRecord {
            init: self.init.clone(),
            energy: self.energy,
            status: self.status,
            iterations: self.iterations,
            escaped: self.escaped,
        }
    }
}

fn clamp_and_rescale(u: &mut GraphFunction, mu: f64) -> Result<()> {
    for x in u.values_mut() {
        if *x < 0.0 || !x.is_finite() {
            *x = 0.0;
        }
    }
    *u = u.rescale_mass(mu)?;
    Ok(())
}

/// Fraction of the mass on halfline edges beyond `L/4` from the root.
pub fn escaped_fraction(u: &GraphFunction) -> f64 {
    let mesh = u.mesh();
    let l = mesh.graph().truncation_length();
    let total = u.mass();
    if !(total > 0.0) {
        return 0.0;
    }
    let mut far = 0.0;
    for (i, em) in mesh.edges().iter().enumerate() {
        if !em.halfline {
            continue;
        }
        let vals = u.edge_values(i);
        for (k, x) in vals.iter().enumerate() {
            if (k as f64) * em.h >= 0.25 * l {
                let w = if k == 0 || k == em.cells { 0.5 } else { 1.0 };
                far += w * em.h * x * x;
            }
        }
    }
    far / total
}

/// Fraction of the mass carried by the maximum node and its mesh neighbours.
pub fn peak_fraction(u: &GraphFunction) -> f64 {
    let mesh = u.mesh();
    let j = u.argmax();
    let m = mesh.lumped_mass();
    let vals = u.values();
    let mut nodes = vec![j];
    for em in mesh.edges() {
        for k in 0..=em.cells {
            if em.node(k) == j {
                if k > 0 {
                    nodes.push(em.node(k - 1));
                }
                if k < em.cells {
                    nodes.push(em.node(k + 1));
                }
            }
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    let near: f64 = nodes.iter().map(|&i| m[i] * vals[i] * vals[i]).sum();
    near / u.mass()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn trial(u: &GraphFunction, dir: &[f64], t: f64, mu: f64, p: f64) -> Option<(GraphFunction, f64)> {
    let mut v = u.clone();
    for (x, d) in v.values_mut().iter_mut().zip(dir) {
        *x += t * d;
    }
    clamp_and_rescale(&mut v, mu).ok()?;
    let e = v.energy(p).total;
    e.is_finite().then_some((v, e))
}

/// Runs the constrained flow from `u0` on its mesh.
pub fn normalized_gradient_flow(
    p: f64,
    mu: f64,
    u0: &GraphFunction,
    cfg: &SolverConfig,
) -> Result<GroundStateResult> {
    cfg.validate()?;
    if !(u0.mass() > 0.0) {
        return Err(Error::ZeroInitialMass);
    }
    let mesh = u0.mesh().clone();
    let mut u = u0.clone();
    clamp_and_rescale(&mut u, mu).map_err(|_| Error::ZeroInitialMass)?;
    let mut energy = u.energy(p).total;
    let mut history = vec![energy];
    let mut drift = ((u.mass() - mu) / mu).abs();
    let mut step = cfg.dt;
    let mut last_change = f64::INFINITY;
    let mut status = RunStatus::MaxIter;
    let mut factor: Option<ShiftedStiffness> = None;
    let m = mesh.lumped_mass().to_vec();
    let n = m.len();
    let mut iterations = 0;
    let collapse_check = p >= 6.0;
    // Previous gradient, preconditioned gradient and search direction.
    let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;

    while iterations < cfg.max_iterations {
        let g = u.energy_gradient(p).0;
        let mass = u.mass();
        let omega = -dot(&g, u.values()) / mass;
        let residual = {
            let mut acc = 0.0;
            for j in 0..n {
                if mesh.is_free(j) {
                    let r = g[j] / m[j] + omega * u.values()[j];
                    acc += m[j] * r * r;
                }
            }
            math::sqrt(acc)
        };
        if last_change < cfg.tol_energy && residual < cfg.tol_residual {
            status = RunStatus::Converged;
            break;
        }
        let mu_vec: Vec<f64> = u.values().iter().zip(&m).map(|(x, w)| x * w).collect();
        // Preconditioned gradient z and the image w of the constraint normal.
        let (z, w) = match cfg.metric {
            FlowMetric::LumpedL2 => {
                let z: Vec<f64> = (0..n).map(|j| if mesh.is_free(j) { g[j] / m[j] } else { 0.0 }).collect();
                (z, u.values().to_vec())
            }
            FlowMetric::Sobolev => {
                let sigma = omega.max(cfg.sigma_min);
                let stale = factor
                    .as_ref()
                    .is_none_or(|f| (f.sigma() - sigma).abs() > 0.01 * sigma);
                if stale {
                    factor = Some(ShiftedStiffness::new(&mesh, sigma));
                }
                let f = factor.as_ref().unwrap();
                (f.solve(&mesh, &g), f.solve(&mesh, &mu_vec))
            }
        };
        let wn = dot(&mu_vec, &w);
        let project = |v: &mut Vec<f64>| {
            if wn > 0.0 {
                let c = dot(&mu_vec, v) / wn;
                for (x, y) in v.iter_mut().zip(&w) {
                    *x -= c * y;
                }
            }
        };
        let mut zp = z;
        project(&mut zp);
        let mut dir: Vec<f64> = zp.iter().map(|x| -x).collect();
        if cfg.descent == Descent::ConjugateGradient {
            if let Some((gp, zpp, dp)) = &prev {
                let den = dot(gp, zpp);
                let num = dot(&g, &zp) - dot(&g, zpp);
                let beta = if den > 0.0 { (num / den).max(0.0) } else { 0.0 };
                if beta > 0.0 {
                    for (d, q) in dir.iter_mut().zip(dp) {
                        *d += beta * q;
                    }
                    project(&mut dir);
                    if dot(&g, &dir) >= 0.0 {
                        dir = zp.iter().map(|x| -x).collect();
                    }
                }
            }
        }
        let slope = dot(&g, &dir);

        // Backtrack until the energy does not increase, then try the
        // minimizer of the quadratic through E(0), E'(0) and E(t).
        let mut accepted = None;
        while step > 1e-14 * cfg.dt && iterations < cfg.max_iterations {
            iterations += 1;
            match trial(&u, &dir, step, mu, p) {
                Some((v, ev)) if ev <= energy + 1e-12 => {
                    accepted = Some((v, ev, step));
                    break;
                }
                _ => step *= 0.5,
            }
        }
        let Some((mut v, mut ev, mut t)) = accepted else {
            if residual < cfg.tol_residual {
                status = RunStatus::Converged;
            }
            break;
        };
        let curv = ev - energy - slope * t;
        if slope < 0.0 && curv > 0.0 && iterations < cfg.max_iterations {
            let tq = -slope * t * t / (2.0 * curv);
            if tq.is_finite() && (tq > 1.2 * t || tq < 0.8 * t) && tq < 1e3 * t {
                iterations += 1;
                if let Some((vq, eq)) = trial(&u, &dir, tq, mu, p) {
                    if eq < ev {
                        v = vq;
                        ev = eq;
                        t = tq;
                    }
                }
            }
        }
        last_change = (energy - ev).abs() / ev.abs().max(1e-300);
        energy = ev;
        u = v;
        history.push(energy);
        drift = drift.max(((u.mass() - mu) / mu).abs());
        step = (2.0 * t).clamp(1e-12 * cfg.dt, cfg.dt_max);
        prev = Some((g, zp, dir));

        if energy < cfg.blowup_energy_floor || (collapse_check && peak_fraction(&u) >= 0.5) {
            status = RunStatus::UnboundedSuspected;
            break;
        }
    }

    let omega = u.lagrange_multiplier(p)?;
    let grad_residual = u.grad_residual(p)?;
    let escaped = escaped_fraction(&u) > 0.5;
    Ok(GroundStateResult {
        interpolant_energy: u.interpolant_energy(p, mu)?,
        mass: u.mass(),
        kirchhoff_max_residual: u.kirchhoff_max(),
        energy,
        omega,
        grad_residual,
        iterations,
        status,
        escaped,
        energy_history: history,
        max_mass_drift: drift,
        init: String::new(),
        trace: Vec::new(),
        u,
    })
}

/// Distance from the point at arc coordinate `s` of edge `e` to every node.
pub fn point_distance_field(mesh: &Mesh, e: usize, s: f64) -> Vec<f64> {
    let tg = mesh.graph();
    let em = &mesh.edges()[e];
    let da = tg.vertex_distances(em.a);
    let db = tg.vertex_distances(em.b);
    let dv: Vec<f64> = (0..mesh.num_vertices())
        .map(|v| (s + da[v]).min(em.length - s + db[v]))
        .collect();
    let mut out = vec![f64::INFINITY; mesh.len()];
    for (i, ed) in mesh.edges().iter().enumerate() {
        for k in 0..=ed.cells {
            let t = k as f64 * ed.h;
            let mut d = (t + dv[ed.a]).min(ed.length - t + dv[ed.b]);
            if i == e {
                d = d.min((t - s).abs());
            }
            let j = ed.node(k);
            if d < out[j] {
                out[j] = d;
            }
        }
    }
    out
}

fn bump(mesh: &Arc<Mesh>, e: usize, s: f64, width: f64, amp: f64) -> GraphFunction {
    let d = point_distance_field(mesh, e, s);
    let vals = d.iter().map(|&x| amp * sech(x / width)).collect();
    GraphFunction::from_values(mesh.clone(), vals).expect("layout matches")
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Initial guesses for the configured strategies, labelled for the trace.
pub fn initial_guesses(
    mesh: &Arc<Mesh>,
    p: f64,
    mu: f64,
    cfg: &SolverConfig,
) -> Vec<(String, GraphFunction)> {
    let width = cfg.bump_width.unwrap_or_else(|| {
        closed_forms::soliton(p, mu)
            .map(|s| 1.0 / s.width_rate)
            .unwrap_or(1.0)
    });
    let tg: &TruncatedGraph = mesh.graph();
    let base = tg.base();
    let l = tg.truncation_length();
    let mut out = Vec::new();
    for strategy in &cfg.init_strategies {
        match strategy {
            InitStrategy::VertexBump => {
                for (v, vert) in base.vertices().iter().enumerate() {
                    if vert.at_infinity {
                        continue;
                    }
                    let Some(e) = mesh.edges().iter().position(|em| em.a == v || em.b == v) else {
                        continue;
                    };
                    let s = if mesh.edges()[e].a == v { 0.0 } else { mesh.edges()[e].length };
                    out.push((format!("vertex_bump:{}", vert.id), bump(mesh, e, s, width, 1.0)));
                }
            }
            InitStrategy::HalflineSoliton => {
                for (e, em) in mesh.edges().iter().enumerate() {
                    if em.halfline {
                        let s = 0.5 * l;
                        let u = match closed_forms::soliton(p, mu) {
                            Ok(sol) => {
                                let d = point_distance_field(mesh, e, s);
                                let vals = d.iter().map(|&x| sol.value(x)).collect();
                                GraphFunction::from_values(mesh.clone(), vals).expect("layout")
                            }
                            Err(_) => bump(mesh, e, s, width, 1.0),
                        };
                        out.push((format!("halfline_soliton:{}", base.edges()[e].id), u));
                    }
                }
            }
            InitStrategy::EdgeUniform => {
                let mut vals = vec![0.0; mesh.len()];
                let has_core = mesh.edges().iter().any(|em| !em.halfline);
                for em in mesh.edges() {
                    for k in 0..=em.cells {
                        let x = k as f64 * em.h;
                        vals[em.node(k)] = if em.halfline {
                            if has_core {
                                math::exp(-x / width)
                            } else {
                                math::exp(-x / (4.0 * width))
                            }
                        } else {
                            1.0
                        };
                    }
                }
                out.push((
                    String::from("edge_uniform"),
                    GraphFunction::from_values(mesh.clone(), vals).expect("layout"),
                ));
            }
            InitStrategy::Random => {
                let weights: Vec<f64> = mesh
                    .edges()
                    .iter()
                    .map(|em| if em.halfline { 0.25 * em.length } else { em.length })
                    .collect();
                let total: f64 = weights.iter().sum();
                for r in 0..cfg.restarts {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
                    let count = 1 + (rng.next_u64() % 3) as usize;
                    let mut vals = vec![0.0; mesh.len()];
                    for _ in 0..count {
                        let mut pick = uniform01(&mut rng) * total;
                        let mut e = 0;
                        while e + 1 < weights.len() && pick > weights[e] {
                            pick -= weights[e];
                            e += 1;
                        }
                        let s = pick.min(mesh.edges()[e].length);
                        let w = width * (0.5 + 1.5 * uniform01(&mut rng));
                        let a = 0.5 + uniform01(&mut rng);
                        let b = bump(mesh, e, s, w, a);
                        for (x, y) in vals.iter_mut().zip(b.values()) {
                            *x += y;
                        }
                    }
                    out.push((
                        format!("random:{r}"),
                        GraphFunction::from_values(mesh.clone(), vals).expect("layout"),
                    ));
                }
            }
        }
    }
    out
}

/// Picks the answer of a multi-start search: a run flagged as unbounded
/// wins, otherwise the lowest-energy converged run.
pub fn select_best(runs: Vec<GroundStateResult>) -> Result<GroundStateResult> {
    let trace: Vec<RunRecord> = runs.iter().map(|r| r.record()).collect();
    let mut best: Option<GroundStateResult> = None;
    for r in runs {
        let better = match &best {
            None => r.status != RunStatus::MaxIter,
            Some(b) => match (b.status, r.status) {
                (RunStatus::UnboundedSuspected, RunStatus::UnboundedSuspected) => r.energy < b.energy,
                (RunStatus::UnboundedSuspected, _) => false,
                (_, RunStatus::UnboundedSuspected) => true,
                (_, RunStatus::Converged) => r.energy < b.energy,
                _ => false,
            },
        };
        if better {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(Error::NoConvergedRun)?;
    best.trace = trace;
    Ok(best)
}

/// Multi-start search on `g` truncated per `cfg`, with extra user-supplied
/// initial guesses on the same mesh.
pub fn ground_state_with(
    mesh: &Arc<Mesh>,
    p: f64,
    mu: f64,
    cfg: &SolverConfig,
    extra: Vec<(String, GraphFunction)>,
) -> Result<GroundStateResult> {
    let mut inits = initial_guesses(mesh, p, mu, cfg);
    inits.extend(extra);
    let mut runs = Vec::with_capacity(inits.len());
    for (label, u0) in inits {
        match normalized_gradient_flow(p, mu, &u0, cfg) {
            Ok(mut r) => {
                r.init = label;
                runs.push(r);
            }
            Err(Error::ZeroInitialMass) => continue,
            Err(e) => return Err(e),
        }
    }
    select_best(runs)
}

pub fn ground_state(g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig) -> Result<GroundStateResult> {
    let mesh = cfg.mesh(g)?;
    ground_state_with(&mesh, p, mu, cfg, Vec::new())
}

/// Ground-state energy lies between the half-soliton and soliton levels,
/// with an allowance of `1e-3 |E_half|`.
pub fn level_pinching_check(result: &GroundStateResult, p: f64, mu: f64) -> bool {
    let (Ok(lo), Ok(hi)) = (halfsoliton_energy(p, mu), soliton_energy(p, mu)) else {
        return false;
    };
    let tol = 1e-3 * lo.abs();
    result.status == RunStatus::Converged && lo - tol <= result.energy && result.energy <= hi + tol
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub param: f64,
    pub energy: Option<f64>,
    pub interpolant_energy: Option<f64>,
    pub omega: Option<f64>,
    pub status: Option<RunStatus>,
    pub iterations: usize,
    pub escaped: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_result(param: f64, r: Result<GroundStateResult>) -> Self {
        match r {
            Ok(r) => SweepRow {
                param,
                energy: Some(r.energy),
                interpolant_energy: Some(r.interpolant_energy),
                omega: Some(r.omega),
                status: Some(r.status),
                iterations: r.iterations,
                escaped: r.escaped,
                error: None,
            },
            Err(e) => SweepRow {
                param,
                energy: None,
                interpolant_energy: None,
                omega: None,
                status: None,
                iterations: 0,
                escaped: false,
                error: Some(format!("{e}")),
            },
        }
    }
}

/// One ground-state search per grid value; failures are recorded in the row.
pub fn sweep<B: Fn(f64) -> Result<MetricGraph>>(
    builder: B,
    p: f64,
    mu: f64,
    grid: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid
        .iter()
        .map(|&x| SweepRow::from_result(x, builder(x).and_then(|g| ground_state(&g, p, mu, cfg))))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhaseTransition {
    pub ell_star: f64,
    pub bracket: (f64, f64),
    /// `(ℓ, E_gs(ℓ) - E_sol)` at every evaluation.
    pub evaluations: Vec<(f64, f64)>,
}

/// Bisection on `f(ℓ) = E_gs(ℓ) - E(φ_μ, ℝ)` down to a bracket of width
/// `width`, with `f` supplied by the caller.
pub fn bisect_transition<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    bracket: (f64, f64),
    width: f64,
) -> Result<PhaseTransition> {
    let (mut lo, mut hi) = bracket;
    let mut evals = Vec::new();
    let flo = f(lo)?;
    evals.push((lo, flo));
    let fhi = f(hi)?;
    evals.push((hi, fhi));
    if (flo > 0.0) == (fhi > 0.0) {
        return Err(Error::NoSignChange);
    }
    let lo_positive = flo > 0.0;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        evals.push((mid, fm));
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(PhaseTransition {
        ell_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        evaluations: evals,
    })
}

/// Bisection with the interpolant energy of the computed minimizer, which
/// cannot dip below the soliton level through discretization error alone.
pub fn find_phase_transition<B: Fn(f64) -> Result<MetricGraph>>(
    builder: B,
    p: f64,
    mu: f64,
    bracket: (f64, f64),
    cfg: &SolverConfig,
) -> Result<PhaseTransition> {
    let level = soliton_energy(p, mu)?;
    bisect_transition(
        |ell| Ok(ground_state(&builder(ell)?, p, mu, cfg)?.interpolant_energy - level),
        bracket,
        1e-2,
    )
}
