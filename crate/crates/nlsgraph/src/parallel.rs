//! Multi-threaded drivers around the sequential solvers. Work items are
//! independent; results are collected in input order so output does not
//! depend on scheduling.

use nlsgraph_core::closed_forms::soliton_energy;
use nlsgraph_core::critical::{self, ProfileRow};
use nlsgraph_core::minimize::{self, PhaseTransition, SweepRow};
use nlsgraph_core::{Error, GraphFunction, GroundStateResult, MetricGraph, SolverConfig};
use rayon::prelude::*;

/// Multi-start ground-state search with the starts run in parallel.
pub fn ground_state_par(
    g: &MetricGraph,
    p: f64,
    mu: f64,
    cfg: &SolverConfig,
    extra: Vec<(String, GraphFunction)>,
) -> Result<GroundStateResult, Error> {
    let mesh = cfg.mesh(g)?;
    let mut inits = minimize::initial_guesses(&mesh, p, mu, cfg);
    inits.extend(extra);
    let runs: Vec<Result<GroundStateResult, Error>> = inits
        .into_par_iter()
        .map(|(label, u0)| {
            minimize::normalized_gradient_flow(p, mu, &u0, cfg).map(|mut r| {
                r.init = label;
                r
            })
        })
        .collect();
    let mut ok = Vec::with_capacity(runs.len());
    for r in runs {
        match r {
            Ok(r) => ok.push(r),
            Err(Error::ZeroInitialMass) => {}
            Err(e) => return Err(e),
        }
    }
    minimize::select_best(ok)
}

pub fn sweep_par<B>(builder: B, p: f64, mu: f64, grid: &[f64], cfg: &SolverConfig) -> Result<Vec<SweepRow>, Error>
where
    B: Fn(f64) -> Result<MetricGraph, Error> + Sync,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(grid
        .par_iter()
        .map(|&x| {
            let r = builder(x).and_then(|g| ground_state_par(&g, p, mu, cfg, Vec::new()));
            SweepRow::from_result(x, r)
        })
        .collect())
}

/// Bisection on the interpolant energy minus the soliton level.
pub fn phase_transition_par<B>(
    builder: B,
    p: f64,
    mu: f64,
    bracket: (f64, f64),
    width: f64,
    cfg: &SolverConfig,
) -> Result<PhaseTransition, Error>
where
    B: Fn(f64) -> Result<MetricGraph, Error> + Sync,
{
    let level = soliton_energy(p, mu)?;
    minimize::bisect_transition(
        |ell| Ok(ground_state_par(&builder(ell)?, p, mu, cfg, Vec::new())?.interpolant_energy - level),
        bracket,
        width,
    )
}

/// Number of sign changes of `interpolant_energy - level` along the rows;
/// rows without an energy are skipped.
pub fn sign_changes(rows: &[SweepRow], level: f64) -> usize {
    let signs: Vec<bool> = rows
        .iter()
        .filter_map(|r| r.interpolant_energy.map(|e| e - level > 0.0))
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn profile6_par(g: &MetricGraph, masses: &[f64], cfg: &SolverConfig) -> Result<Vec<ProfileRow>, Error> {
    if masses.is_empty() {
        return Err(Error::EmptyGrid);
    }
    masses
        .par_iter()
        .map(|&mu| critical::profile_point(g, mu, cfg))
        .collect()
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlsgraph_core::shapes;

    fn coarse() -> SolverConfig {
        let mut cfg = SolverConfig::for_problem(4.0, 1.0);
        cfg.truncation_length = 30.0;
        cfg.h_target = 0.1;
        cfg
    }

    #[test]
    fn matches_sequential_search() {
        let g = shapes::tadpole(3.0).unwrap();
        let cfg = coarse();
        let a = minimize::ground_state(&g, 4.0, 1.0, &cfg).unwrap();
        let b = ground_state_par(&g, 4.0, 1.0, &cfg, Vec::new()).unwrap();
        assert_eq!(a.u.values(), b.u.values());
        assert_eq!(a.init, b.init);
    }

    #[test]
    fn sweep_keeps_order_and_errors() {
        let rows = sweep_par(shapes::tadpole, 4.0, 1.0, &[2.0, -1.0, 4.0], &coarse()).unwrap();
        assert_eq!(rows.iter().map(|r| r.param).collect::<Vec<_>>(), vec![2.0, -1.0, 4.0]);
        assert!(rows[1].error.is_some());
        assert!(rows[0].energy.is_some() && rows[2].energy.is_some());
        assert_eq!(sweep_par(shapes::tadpole, 4.0, 1.0, &[], &coarse()).unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn grid_helpers() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        let row = |e: f64| SweepRow {
            param: 0.0,
            energy: Some(e),
            interpolant_energy: Some(e),
            omega: None,
            status: None,
            iterations: 0,
            escaped: false,
            error: None,
        };
        assert_eq!(sign_changes(&[row(1.0), row(0.5), row(-1.0), row(-2.0)], 0.0), 1);
        assert_eq!(sign_changes(&[row(1.0), row(-0.5), row(1.0)], 0.0), 2);
    }
}
