//! Explicit competitors built by cutting, folding and rearranging the
//! soliton of the line.
//!
//! Every construction starts from `φ_μ` on the line, moves its pieces onto
//! the target graph without changing their distribution, and rearranges at
//! least one piece monotonically. The result has the soliton's mass and
//! potential, and strictly less kinetic energy whenever a rearranged piece
//! had two preimages per level.
//!
//! Tails moved onto a halfline by rearrangement decay at half the soliton's
//! rate, so the truncation length in the configuration should be about
//! twice the one used for the soliton itself.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::closed_forms::{self, SolitonParams};
use crate::error::{Error, Result};
use crate::function_space::{GraphFunction, Mesh};
use crate::graph::MetricGraph;
use crate::math::ceil;
use crate::minimize::SolverConfig;
use crate::rearrange::{self, Cell, PlProfile};
use crate::topology;

/// Sampling step used for pieces that are rearranged numerically.
const PIECE_STEP: f64 = 1e-3;

/// The soliton split at `±ℓ/2` into a head and two equal tails.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonCut {
    pub soliton: SolitonParams,
    pub ell: f64,
    /// Samples of `φ_μ` on `[-ℓ/2, ℓ/2]` with step `head_step`.
    pub head: Vec<f64>,
    pub head_step: f64,
    /// Samples of `φ_μ` on `[ℓ/2, ℓ/2 + tail_length]`; the left tail is
    /// its mirror image.
    pub tail: Vec<f64>,
    pub tail_step: f64,
    pub head_mass: f64,
    /// Mass of one tail.
    pub tail_mass: f64,
}

fn uniform_samples(s: &SolitonParams, lo: f64, hi: f64, step: f64) -> (Vec<f64>, f64) {
    let n = (ceil((hi - lo) / step) as usize).max(2);
    let h = (hi - lo) / n as f64;
    let v = (0..=n)
        .map(|k| if k == n { s.value(hi) } else { s.value(lo + k as f64 * h) })
        .collect();
    (v, h)
}

pub fn cut_soliton(p: f64, mu: f64, ell: f64) -> Result<SolitonCut> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::NonpositiveWidth);
    }
    let s = closed_forms::soliton(p, mu)?;
    let half = 0.5 * ell;
    let (head, head_step) = uniform_samples(&s, -half, half, PIECE_STEP.min(ell / 64.0));
    let tail_end = half.max(s.window());
    let (tail, tail_step) = if tail_end > half {
        uniform_samples(&s, half, tail_end, PIECE_STEP)
    } else {
        (alloc::vec![s.value(half)], 0.0)
    };
    let head_mass = s.mass_between(-half, half);
    Ok(SolitonCut {
        soliton: s,
        ell,
        head,
        head_step,
        tail,
        tail_step,
        head_mass,
        tail_mass: s.mass_between(half, tail_end),
    })
}

/// Decreasing rearrangement of `φ_μ` restricted to a union of intervals.
fn rearranged_piece(s: &SolitonParams, intervals: &[(f64, f64)]) -> Result<PlProfile> {
    let mut cells: Vec<Cell> = Vec::new();
    for &(lo, hi) in intervals {
        let (v, h) = uniform_samples(s, lo, hi, PIECE_STEP.min((hi - lo) / 64.0));
        cells.extend(rearrange::cells_from_samples(h, &v));
    }
    rearrange::monotone_rearrangement_of_cells(&cells)
}

fn finish(mesh: Arc<Mesh>, mu: f64, f: impl Fn(usize, f64) -> f64) -> Result<GraphFunction> {
    GraphFunction::sample(mesh, f)?.rescale_mass(mu)
}

fn shape_error(what: &str) -> Error {
    Error::WrongShape(format!("expected a {what}"))
}

/// Finite edge `e` seen from `v`: maps the distance from `v` to the arc
/// coordinate from `e.a`.
fn from_vertex(g: &MetricGraph, e: usize, v: usize) -> impl Fn(f64) -> f64 {
    let edge = &g.edges()[e];
    let len = edge.length.finite().unwrap_or(0.0);
    let flip = edge.a != v;
    move |x| if flip { len - x } else { x }
}

/// Root carrying exactly two halflines and nothing else at infinity.
fn two_halflines_root(g: &MetricGraph) -> Option<usize> {
    let h: Vec<usize> = g.edges().iter().filter(|e| e.is_halfline()).map(|e| e.a).collect();
    (h.len() == 2 && h[0] == h[1]).then_some(h[0])
}

fn single_halfline_root(g: &MetricGraph) -> Option<usize> {
    let h: Vec<usize> = g.edges().iter().filter(|e| e.is_halfline()).map(|e| e.a).collect();
    (h.len() == 1).then_some(h[0])
}

/// Edge `e` is finite, not a loop, joins `v` to a vertex of degree one.
fn is_terminal_at(g: &MetricGraph, e: usize, v: usize) -> bool {
    let edge = &g.edges()[e];
    !edge.is_halfline() && !edge.is_loop() && (edge.a == v || edge.b == v)
        && g.degree_of(edge.other(v)) == 1
}

/// Line with one pendant of length `ℓ`: the tails are glued at the vertex
/// and the head, rearranged monotonically, goes on the pendant with its
/// maximum at the tip.
pub fn pendant_competitor(g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig) -> Result<GraphFunction> {
    let root = two_halflines_root(g).ok_or_else(|| shape_error("line with a pendant"))?;
    let pendant = (0..g.edges().len())
        .find(|&e| !g.edges()[e].is_halfline())
        .filter(|&e| g.edges().len() == 3 && is_terminal_at(g, e, root))
        .ok_or_else(|| shape_error("line with a pendant"))?;
    let ell = g.edges()[pendant].length.finite().unwrap();
    let s = closed_forms::soliton(p, mu)?;
    let head = rearranged_piece(&s, &[(-0.5 * ell, 0.5 * ell)])?;
    let to_arc = from_vertex(g, pendant, root);
    let half = 0.5 * ell;
    finish(cfg.mesh(g)?, mu, |e, x| {
        if e == pendant {
            head.eval(ell - to_arc(x))
        } else {
            s.value(half + x)
        }
    })
}

/// Places `φ_μ` isometrically on a bubble tower: each pair of parallel edges
/// carries the two mirror-image slices and the top loop carries the head.
pub fn fold_on_bubble_tower(g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig) -> Result<GraphFunction> {
    if !topology::is_bubble_tower(g) {
        return Err(Error::NotABubbleTower);
    }
    let s = closed_forms::soliton(p, mu)?;
    let d = g.core_distances();
    let edges = g.edges();
    let finite_len = |e: usize| edges[e].length.finite().unwrap_or(0.0);
    if topology::is_line(g) {
        // Centre the soliton in the middle of the finite path.
        let ends: Vec<usize> = edges.iter().filter(|e| e.is_halfline()).map(|e| e.a).collect();
        let (e0, core) = (ends[0], d[ends[0]][ends[1]]);
        return finish(cfg.mesh(g)?, mu, |e, x| {
            let edge = &edges[e];
            if edge.is_halfline() {
                s.value(0.5 * core + x)
            } else {
                let t = (d[e0][edge.a] + x).min(d[e0][edge.b] + finite_len(e) - x);
                s.value(t - 0.5 * core)
            }
        });
    }
    let root = two_halflines_root(g).ok_or(Error::NotABubbleTower)?;
    // The farthest point from the root is the middle of the top loop and
    // corresponds to the soliton's centre.
    let depth = |e: usize, x: f64| {
        let edge = &edges[e];
        (d[root][edge.a] + x).min(d[root][edge.b] + finite_len(e) - x)
    };
    let top = (0..edges.len())
        .filter(|&e| edges[e].is_loop())
        .map(|e| d[root][edges[e].a] + 0.5 * finite_len(e))
        .fold(0.0, f64::max);
    finish(cfg.mesh(g)?, mu, |e, x| {
        if edges[e].is_halfline() {
            s.value(top + x)
        } else {
            s.value(top - depth(e, x))
        }
    })
}

/// Signpost with a loop of length `ℓ₁` on a stem of length `ℓ₂`: the
/// soliton folded on the double bubble with top loop `ℓ₁` and pair
/// `ℓ₂/2`, whose pair is then rearranged monotonically onto the stem.
pub fn signpost_competitor(g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig) -> Result<GraphFunction> {
    let err = || shape_error("signpost (loop on a stem, two halflines at its base)");
    let root = two_halflines_root(g).ok_or_else(err)?;
    if g.edges().len() != 4 || g.degree_of(root) != 3 {
        return Err(err());
    }
    let edges = g.edges();
    let stem = (0..4)
        .find(|&e| !edges[e].is_halfline() && !edges[e].is_loop())
        .ok_or_else(err)?;
    let top = edges[stem].other(root);
    let lp = (0..4)
        .find(|&e| edges[e].is_loop() && edges[e].a == top)
        .ok_or_else(err)?;
    let (stem_len, loop_len) = (edges[stem].length.finite().unwrap(), edges[lp].length.finite().unwrap());
    let s = closed_forms::soliton(p, mu)?;
    let x1 = 0.5 * loop_len;
    let x2 = x1 + 0.5 * stem_len;
    let v = rearranged_piece(&s, &[(x1, x2), (-x2, -x1)])?;
    let on_stem = from_vertex(g, stem, root);
    finish(cfg.mesh(g)?, mu, |e, x| {
        if e == stem {
            // Decreasing from the loop towards the root.
            v.eval(stem_len - on_stem(x))
        } else if e == lp {
            s.value(x1 - x.min(loop_len - x))
        } else {
            s.value(x2 + x)
        }
    })
}

/// Tadpole (a loop and one halfline at the same vertex): the head sits on
/// the loop as on a one-bubble tower and both tails are rearranged onto the
/// halfline.
pub fn tadpole_competitor(g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig) -> Result<GraphFunction> {
    let err = || shape_error("tadpole (loop and halfline at one vertex)");
    let root = single_halfline_root(g).ok_or_else(err)?;
    let edges = g.edges();
    let lp = (0..edges.len())
        .find(|&e| edges[e].is_loop() && edges[e].a == root)
        .filter(|_| edges.len() == 2)
        .ok_or_else(err)?;
    let loop_len = edges[lp].length.finite().unwrap();
    let s = closed_forms::soliton(p, mu)?;
    let x1 = 0.5 * loop_len;
    finish(cfg.mesh(g)?, mu, |e, x| {
        if e == lp {
            s.value(x1 - x.min(loop_len - x))
        } else {
            // Rearrangement of the even tail |x| > x1 onto [0, ∞).
            s.value(x1 + 0.5 * x)
        }
    })
}

/// 3-fork with edges `a, b, c` at the halfline's root. Start from the
/// double bubble with top loop `a + b` and pairs of length `c`, cut the top
/// loop where it splits into arcs `a` and `b`, detach one arc of the pair
/// at its far end, and rearrange both tails onto the halfline after the
/// other arc.
pub fn fork_competitor(g: &MetricGraph, p: f64, mu: f64, cfg: &SolverConfig) -> Result<GraphFunction> {
    let err = || shape_error("3-fork (three pendants at the root of one halfline)");
    let root = single_halfline_root(g).ok_or_else(err)?;
    let edges = g.edges();
    let prongs: Vec<usize> = (0..edges.len()).filter(|&e| !edges[e].is_halfline()).collect();
    if edges.len() != 4 || prongs.len() != 3 || !prongs.iter().all(|&e| is_terminal_at(g, e, root)) {
        return Err(err());
    }
    let len = |e: usize| edges[e].length.finite().unwrap();
    let (a, b, c) = (len(prongs[0]), len(prongs[1]), len(prongs[2]));
    let s = closed_forms::soliton(p, mu)?;
    let x1 = 0.5 * (a + b);
    let x2 = x1 + c;
    let arcs: Vec<_> = prongs.iter().map(|&e| from_vertex(g, e, root)).collect();
    finish(cfg.mesh(g)?, mu, |e, x| {
        if let Some(i) = prongs.iter().position(|&q| q == e) {
            let y = arcs[i](x);
            if i < 2 { s.value(x1 - y) } else { s.value(x1 + y) }
        } else if x <= c {
            s.value(x1 + x)
        } else {
            s.value(x2 + 0.5 * (x - c))
        }
    })
}

/// The shapes with a known construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CompetitorShape {
    Pendant,
    Signpost,
    Tadpole,
    Fork3,
    BubbleTower,
}

impl CompetitorShape {
    pub const ALL: [CompetitorShape; 5] = [
        CompetitorShape::Pendant,
        CompetitorShape::Signpost,
        CompetitorShape::Tadpole,
        CompetitorShape::Fork3,
        CompetitorShape::BubbleTower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CompetitorShape::Pendant => "pendant",
            CompetitorShape::Signpost => "signpost",
            CompetitorShape::Tadpole => "tadpole",
            CompetitorShape::Fork3 => "fork3",
            CompetitorShape::BubbleTower => "bubbletower",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

pub fn competitor(
    shape: CompetitorShape,
    g: &MetricGraph,
    p: f64,
    mu: f64,
    cfg: &SolverConfig,
) -> Result<GraphFunction> {
    match shape {
        CompetitorShape::Pendant => pendant_competitor(g, p, mu, cfg),
        CompetitorShape::Signpost => signpost_competitor(g, p, mu, cfg),
        CompetitorShape::Tadpole => tadpole_competitor(g, p, mu, cfg),
        CompetitorShape::Fork3 => fork_competitor(g, p, mu, cfg),
        CompetitorShape::BubbleTower => fold_on_bubble_tower(g, p, mu, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn cfg() -> SolverConfig {
        let mut c = SolverConfig::for_problem(4.0, 1.0);
        c.truncation_length *= 2.0;
        c
    }

    #[test]
    fn cut_masses() {
        let c = cut_soliton(4.0, 1.0, 1.0).unwrap();
        assert!((c.head_mass + 2.0 * c.tail_mass - 1.0).abs() < 1e-10);
        assert_eq!(c.head.len() % 2, 1);
        assert_eq!(c.head[0], c.head[c.head.len() - 1]);
        assert_eq!(*c.tail.first().unwrap(), c.soliton.value(0.5));
        let whole = cut_soliton(4.0, 1.0, 300.0).unwrap();
        assert!((whole.head_mass - 1.0).abs() < 1e-10);
        let tiny = cut_soliton(4.0, 1.0, 1e-6).unwrap();
        assert!(tiny.head_mass < 1e-6);
        assert_eq!(cut_soliton(4.0, 1.0, 0.0).unwrap_err(), Error::NonpositiveWidth);
    }

    #[test]
    fn pendant_beats_soliton() {
        let g = shapes::pendant_line(1.0).unwrap();
        let u = pendant_competitor(&g, 4.0, 1.0, &cfg()).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-12);
        let e = u.energy(4.0).total;
        assert!(e < -1.0 / 96.0 - 1e-6, "{e}");
    }

    #[test]
    fn wrong_shapes_rejected() {
        let g = shapes::tadpole(1.0).unwrap();
        assert!(matches!(pendant_competitor(&g, 4.0, 1.0, &cfg()), Err(Error::WrongShape(_))));
        assert!(matches!(fork_competitor(&g, 4.0, 1.0, &cfg()), Err(Error::WrongShape(_))));
        assert_eq!(
            fold_on_bubble_tower(&g, 4.0, 1.0, &cfg()).unwrap_err(),
            Error::NotABubbleTower
        );
    }
}
