//! Distribution functions and rearrangements of piecewise-linear functions.
//!
//! Everything works on the exact interpolant. On each cell the superlevel
//! measure is linear in the level, so a single descending sweep over the
//! distinct nodal values gives the distribution function exactly, and the
//! decreasing rearrangement is again piecewise linear with knots at those
//! values.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::function_space::GraphFunction;
use crate::math;

/// One linear piece: width and the values at its two ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub h: f64,
    pub left: f64,
    pub right: f64,
}

/// Cells of a function on a graph, edge by edge.
pub fn cells_of(u: &GraphFunction) -> Vec<Cell> {
    let mut out = Vec::new();
    for (e, em) in u.mesh().edges().iter().enumerate() {
        let vals = u.edge_values(e);
        for w in vals.windows(2) {
            out.push(Cell {
                h: em.h,
                left: w[0],
                right: w[1],
            });
        }
    }
    out
}

/// Cells of a uniformly sampled function on an interval.
pub fn cells_from_samples(h: f64, values: &[f64]) -> Vec<Cell> {
    values
        .windows(2)
        .map(|w| Cell {
            h,
            left: w[0],
            right: w[1],
        })
        .collect()
}

/// `ρ(t) = |{u > t}|`, stored at the distinct nodal values. Between two
/// consecutive levels it is linear; at a level carried by a plateau it jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction {
    /// Distinct values, descending.
    pub levels: Vec<f64>,
    /// `ρ(t)` at each level (right-continuous value, `|{u > t}|`).
    pub at: Vec<f64>,
    /// `|{u ≥ t}|` at each level.
    pub below: Vec<f64>,
    pub total_length: f64,
}

impl DistributionFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.levels.len();
        if n == 0 || t >= self.levels[0] {
            return 0.0;
        }
        if t < self.levels[n - 1] {
            return self.total_length;
        }
        // First index with levels[k] <= t.
        let k = self.levels.partition_point(|&l| l > t);
        if self.levels[k] == t {
            return self.at[k];
        }
        let (t0, t1) = (self.levels[k - 1], self.levels[k]);
        let (r0, r1) = (self.below[k - 1], self.at[k]);
        r0 + (r1 - r0) * (t0 - t) / (t0 - t1)
    }
}

fn check_nonnegative(cells: &[Cell]) -> Result<()> {
    if cells.iter().any(|c| c.left < 0.0 || c.right < 0.0) {
        Err(Error::NegativeValues)
    } else {
        Ok(())
    }
}

pub fn distribution_of_cells(cells: &[Cell]) -> Result<DistributionFunction> {
    check_nonnegative(cells)?;
    let total_length: f64 = cells.iter().map(|c| c.h).sum();
    let mut levels: Vec<f64> = cells.iter().flat_map(|c| [c.left, c.right]).collect();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();
    let n = levels.len();
    let index = |t: f64| levels.partition_point(|&l| l > t);
    // Per level: slope switched on (cells whose top is here), switched off
    // (cells whose bottom is here), and plateau length.
    let mut on = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut flat = vec![0.0; n];
    for c in cells {
        let (lo, hi) = if c.left <= c.right { (c.left, c.right) } else { (c.right, c.left) };
        if hi == lo {
            flat[index(lo)] += c.h;
        } else {
            let s = c.h / (hi - lo);
            on[index(hi)] += s;
            off[index(lo)] += s;
        }
    }
    let mut at = vec![0.0; n];
    let mut below = vec![0.0; n];
    let mut slope = 0.0;
    let mut rho = 0.0;
    for k in 0..n {
        if k > 0 {
            rho += slope * (levels[k - 1] - levels[k]);
        }
        at[k] = rho;
        rho += flat[k];
        below[k] = rho;
        slope += on[k] - off[k];
        if slope < 0.0 {
            slope = 0.0;
        }
    }
    Ok(DistributionFunction {
        levels,
        at,
        below,
        total_length,
    })
}

pub fn distribution(u: &GraphFunction) -> Result<DistributionFunction> {
    distribution_of_cells(&cells_of(u))
}

/// Piecewise-linear profile on `[knots[0].0, knots.last().0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlProfile {
    /// `(x, value)` with nondecreasing `x`.
    pub knots: Vec<(f64, f64)>,
}

impl PlProfile {
    pub fn start(&self) -> f64 {
        self.knots.first().map_or(0.0, |k| k.0)
    }

    pub fn end(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k.0)
    }

    pub fn length(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if k.is_empty() {
            return 0.0;
        }
        if x <= k[0].0 {
            return k[0].1;
        }
        let i = k.partition_point(|p| p.0 < x);
        if i >= k.len() {
            return k[k.len() - 1].1;
        }
        let (x0, v0) = k[i - 1];
        let (x1, v1) = k[i];
        if x1 <= x0 {
            return v1;
        }
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }

    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.knots.windows(2).map(|w| (w[0], w[1]))
    }

    /// `½ ∫ |v'|²`.
    pub fn kinetic(&self) -> f64 {
        0.5 * self
            .segments()
            .filter(|(a, b)| b.0 > a.0)
            .map(|(a, b)| (b.1 - a.1) * (b.1 - a.1) / (b.0 - a.0))
            .sum::<f64>()
    }

    /// `∫ |v|^p`, exact on the interpolant.
    pub fn power_integral(&self, p: f64) -> f64 {
        self.segments()
            .filter(|(a, b)| b.0 > a.0)
            .map(|(a, b)| (b.0 - a.0) * math::mean_power_linear(a.1.abs(), b.1.abs(), p))
            .sum()
    }

    pub fn energy(&self, p: f64) -> f64 {
        self.kinetic() - self.power_integral(p) / p
    }

    /// Values at `x_k = start + k·len/n`, `k = 0..=n`.
    pub fn resample(&self, n: usize) -> Vec<f64> {
        let (a, l) = (self.start(), self.length());
        (0..=n).map(|k| self.eval(a + l * k as f64 / n as f64)).collect()
    }

    /// `x ↦ v(2|x|)` on `[-L/2, L/2]` for a profile starting at zero.
    pub fn symmetrize(&self) -> PlProfile {
        let mut knots: Vec<(f64, f64)> = self.knots.iter().rev().map(|&(x, v)| (-0.5 * x, v)).collect();
        knots.extend(self.knots.iter().skip(1).map(|&(x, v)| (0.5 * x, v)));
        PlProfile { knots }
    }
}

pub fn monotone_rearrangement_of_cells(cells: &[Cell]) -> Result<PlProfile> {
    let d = distribution_of_cells(cells)?;
    let mut knots = Vec::with_capacity(2 * d.levels.len() + 1);
    for k in 0..d.levels.len() {
        knots.push((d.at[k], d.levels[k]));
        if d.below[k] > d.at[k] {
            knots.push((d.below[k], d.levels[k]));
        }
    }
    // Rounding in the sweep must not make the abscissae decrease.
    for i in 1..knots.len() {
        if knots[i].0 < knots[i - 1].0 {
            knots[i].0 = knots[i - 1].0;
        }
    }
    if let Some(last) = knots.last_mut() {
        last.0 = d.total_length;
    }
    Ok(PlProfile { knots })
}

/// Nonincreasing function on `[0, |G|]` equimeasurable with `u`.
pub fn monotone_rearrangement(u: &GraphFunction) -> Result<PlProfile> {
    monotone_rearrangement_of_cells(&cells_of(u))
}

/// Even, symmetric-decreasing function on `[-|G|/2, |G|/2]` equimeasurable
/// with `u`.
pub fn symmetric_rearrangement(u: &GraphFunction) -> Result<PlProfile> {
    Ok(monotone_rearrangement(u)?.symmetrize())
}

/// Number of solutions of `u = t` on bands of levels strictly between
/// consecutive distinct nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct PreimageCount {
    /// `(t_lo, t_hi, N)` with `N` constant on `(t_lo, t_hi)`, ascending.
    pub bands: Vec<(f64, f64, usize)>,
    /// Levels at which `u` has a plateau.
    pub degenerate: Vec<f64>,
}

impl PreimageCount {
    /// `N(t)` for a level inside one of the bands; `None` on a band edge.
    pub fn at(&self, t: f64) -> Option<usize> {
        self.bands
            .iter()
            .find(|b| b.0 < t && t < b.1)
            .map(|b| b.2)
    }

    pub fn min(&self) -> usize {
        self.bands.iter().map(|b| b.2).min().unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.bands.iter().map(|b| b.2).max().unwrap_or(0)
    }
}

fn crossings(cells: &[Cell], t: f64) -> usize {
    cells
        .iter()
        .filter(|c| (c.left - t) * (c.right - t) < 0.0)
        .count()
}

pub fn preimage_count_of_cells(cells: &[Cell]) -> Result<PreimageCount> {
    check_nonnegative(cells)?;
    let mut levels: Vec<f64> = cells.iter().flat_map(|c| [c.left, c.right]).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Levels that differ only by rounding would give empty bands.
    let tol = 1e-12 * levels.last().copied().unwrap_or(0.0);
    levels.dedup_by(|b, a| *b - *a <= tol);
    if levels.len() < 2 {
        return Err(Error::ConstantFunction);
    }
    let mut degenerate: Vec<f64> = cells
        .iter()
        .filter(|c| c.left == c.right && c.left > 0.0)
        .map(|c| c.left)
        .collect();
    degenerate.sort_by(|a, b| a.partial_cmp(b).unwrap());
    degenerate.dedup();
    let bands = levels
        .windows(2)
        .filter(|w| w[1] > 0.0)
        .map(|w| {
            let lo = w[0].max(0.0);
            (lo, w[1], crossings(cells, 0.5 * (lo + w[1])))
        })
        .collect();
    Ok(PreimageCount { bands, degenerate })
}

pub fn preimage_count(u: &GraphFunction) -> Result<PreimageCount> {
    preimage_count_of_cells(&cells_of(u))
}

/// `N(t)` at user-chosen levels; levels equal to a nodal value are not
/// transversal and report `None`.
pub fn preimage_count_at(u: &GraphFunction, levels: &[f64]) -> Result<Vec<Option<usize>>> {
    let cells = cells_of(u);
    check_nonnegative(&cells)?;
    Ok(levels
        .iter()
        .map(|&t| {
            let hits_node = cells.iter().any(|c| c.left == t || c.right == t);
            (!hits_node).then(|| crossings(&cells, t))
        })
        .collect())
}

/// `½‖u'‖² - ½‖(u*)'‖²`; nonnegative by the Pólya–Szegő inequality.
pub fn polya_szego_gap(u: &GraphFunction) -> Result<f64> {
    Ok(u.kinetic() - monotone_rearrangement(u)?.kinetic())
}

/// `½‖u'‖² - ½‖û'‖²`; nonnegative when `N(t) ≥ 2` almost everywhere.
pub fn symmetric_polya_szego_gap(u: &GraphFunction) -> Result<f64> {
    Ok(u.kinetic() - symmetric_rearrangement(u)?.kinetic())
}
