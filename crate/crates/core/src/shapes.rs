//! Named graphs: the standard examples and the parametric families used in
//! sweeps. Halflines are named after their role and rooted as described on
//! each constructor.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MetricGraph};

/// The real line: one vertex `o`, halflines `left` and `right`.
pub fn line() -> MetricGraph {
    GraphBuilder::new()
        .vertex("o")
        .halfline("left", "o")
        .halfline("right", "o")
        .build()
        .expect("line is valid")
}

pub fn halfline() -> MetricGraph {
    GraphBuilder::new()
        .vertex("o")
        .halfline("h", "o")
        .build()
        .expect("halfline is valid")
}

/// `n` halflines `h0..` glued at `o`.
pub fn star(n: usize) -> Result<MetricGraph> {
    let mut b = GraphBuilder::new().vertex("o");
    for i in 0..n {
        b = b.halfline(&format!("h{i}"), "o");
    }
    b.build()
}

/// Parallel edges `e0..` between `x` and `y`, one halfline at each.
pub fn bridge(lengths: &[f64]) -> Result<MetricGraph> {
    let mut b = GraphBuilder::new().vertex("x").vertex("y");
    for (i, &l) in lengths.iter().enumerate() {
        b = b.edge(&format!("e{i}"), "x", "y", l);
    }
    b.halfline("hx", "x").halfline("hy", "y").build()
}

/// Line through `o` with a terminal edge `pendant` from `o` to `tip`.
pub fn pendant_line(ell: f64) -> Result<MetricGraph> {
    GraphBuilder::new()
        .vertex("o")
        .vertex("tip")
        .halfline("left", "o")
        .halfline("right", "o")
        .edge("pendant", "o", "tip", ell)
        .build()
}

/// Two halflines at `r`, a `stem` from `r` to `s`, and a `loop` at `s`.
pub fn signpost(stem: f64, loop_len: f64) -> Result<MetricGraph> {
    GraphBuilder::new()
        .vertex("r")
        .vertex("s")
        .halfline("left", "r")
        .halfline("right", "r")
        .edge("stem", "r", "s", stem)
        .edge("loop", "s", "s", loop_len)
        .build()
}

/// A `loop` and one halfline `h` at `o`.
pub fn tadpole(loop_len: f64) -> Result<MetricGraph> {
    GraphBuilder::new()
        .vertex("o")
        .edge("loop", "o", "o", loop_len)
        .halfline("h", "o")
        .build()
}

/// Terminal edges `f0..` from the center `c` to tips `t0..`, plus one
/// halfline `h` at `c`.
pub fn fork(lengths: &[f64]) -> Result<MetricGraph> {
    let mut b = GraphBuilder::new().vertex("c").halfline("h", "c");
    for (i, &l) in lengths.iter().enumerate() {
        let tip = format!("t{i}");
        b = b.vertex(&tip).edge(&format!("f{i}"), "c", &tip, l);
    }
    b.build()
}

pub fn n_fork(n: usize, ell: f64) -> Result<MetricGraph> {
    fork(&alloc::vec![ell; n])
}

/// Three halflines and one terminal edge of length `ell` at `o`.
pub fn g_ell(ell: f64) -> Result<MetricGraph> {
    GraphBuilder::new()
        .vertex("o")
        .vertex("tip")
        .halfline("h0", "o")
        .halfline("h1", "o")
        .halfline("h2", "o")
        .edge("pendant", "o", "tip", ell)
        .build()
}

/// The line with the pairs `x_j ~ -x_j` identified, `0 < x_1 < ... < x_k`.
///
/// Vertex `b{k}` carries both halflines; vertex `b{j}` (the image of `±x_j`)
/// is joined to `b{j+1}` by edges `p{j}a`, `p{j}b` of length `x_{j+1} - x_j`,
/// and `b1` carries the top loop `top` of length `2 x_1`. No cut points gives
/// the line.
pub fn bubble_tower(cuts: &[f64]) -> Result<MetricGraph> {
    if cuts.is_empty() {
        return Ok(line());
    }
    if cuts[0] <= 0.0 || cuts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonpositiveWidth);
    }
    let k = cuts.len();
    let mut b = GraphBuilder::new();
    for j in 1..=k {
        b = b.vertex(&format!("b{j}"));
    }
    let root = format!("b{k}");
    b = b.halfline("left", &root).halfline("right", &root);
    b = b.edge("top", "b1", "b1", 2.0 * cuts[0]);
    for j in 1..k {
        let l = cuts[j] - cuts[j - 1];
        let (lo, hi) = (format!("b{j}"), format!("b{}", j + 1));
        b = b
            .edge(&format!("p{j}a"), &lo, &hi, l)
            .edge(&format!("p{j}b"), &lo, &hi, l);
    }
    b.build()
}

/// Bubble tower with explicit pair lengths; used to build near-towers whose
/// paired edges differ.
pub fn tower_with_pairs(top: f64, pairs: &[(f64, f64)]) -> Result<MetricGraph> {
    let k = pairs.len() + 1;
    let mut b = GraphBuilder::new();
    for j in 1..=k {
        b = b.vertex(&format!("b{j}"));
    }
    let root = format!("b{k}");
    b = b
        .halfline("left", &root)
        .halfline("right", &root)
        .edge("top", "b1", "b1", top);
    for (j, &(l1, l2)) in pairs.iter().enumerate() {
        let (lo, hi) = (format!("b{}", j + 1), format!("b{}", j + 2));
        b = b
            .edge(&format!("p{}a", j + 1), &lo, &hi, l1)
            .edge(&format!("p{}b", j + 1), &lo, &hi, l2);
    }
    b.build()
}

fn from_lists(finite: &[(&str, &str)], halflines: &[&str], ell: f64) -> MetricGraph {
    let mut names: Vec<&str> = Vec::new();
    for (a, b) in finite {
        for v in [a, b] {
            if !names.contains(v) {
                names.push(v);
            }
        }
    }
    for v in halflines {
        if !names.contains(v) {
            names.push(v);
        }
    }
    let mut gb = GraphBuilder::new();
    for v in &names {
        gb = gb.vertex(v);
    }
    for (i, (a, b)) in finite.iter().enumerate() {
        gb = gb.edge(&format!("e{i}"), a, b, ell);
    }
    for (i, v) in halflines.iter().enumerate() {
        gb = gb.halfline(&format!("h{i}"), v);
    }
    gb.build().expect("catalogue graph is valid")
}

const MESH_EDGES: [(&str, &str); 19] = [
    ("w", "nw"),
    ("nw", "n"),
    ("nw", "c"),
    ("n", "c"),
    ("w", "sw"),
    ("sw", "c"),
    ("sw", "s"),
    ("s", "c"),
    ("c", "m"),
    ("n", "m"),
    ("n", "ne"),
    ("m", "ne"),
    ("ne", "e"),
    ("m", "se"),
    ("s", "se"),
    ("s", "ss"),
    ("ss", "se"),
    ("se", "e"),
    ("ss", "e"),
];

/// A meshed core with three halflines and a terminal edge at `ne`.
pub fn terminal_example() -> MetricGraph {
    let mut finite: Vec<(&str, &str)> = MESH_EDGES.to_vec();
    finite.push(("ne", "tip"));
    from_lists(&finite, &["w", "e", "nw"], 1.0)
}

/// The same meshed core with a single halfline and no terminal point.
pub fn one_halfline_example() -> MetricGraph {
    from_lists(&MESH_EDGES, &["w"], 1.0)
}

/// A core made of triangles with three halflines; satisfies the
/// edge-removal condition.
pub fn covered_example() -> MetricGraph {
    let finite = [
        ("bot", "r1"),
        ("bot", "l1"),
        ("bot", "mid"),
        ("l1", "mid"),
        ("mid", "r1"),
        ("top", "l3"),
        ("top", "r3"),
        ("l3", "l1"),
        ("top", "mid"),
        ("r3", "r1"),
        ("r3", "mid"),
    ];
    from_lists(&finite, &["l1", "l3", "r1"], 1.0)
}

/// A line with decorations and three halflines, without terminal points, in
/// which the edge `stalk` joining the line to a loop is a bridge.
pub fn uncovered_example() -> MetricGraph {
    GraphBuilder::new()
        .vertex("a")
        .vertex("b")
        .vertex("c")
        .vertex("d")
        .vertex("e")
        .vertex("up")
        .vertex("down")
        .vertex("lh")
        .vertex("rh")
        .vertex("rt")
        .halfline("h0", "a")
        .halfline("h1", "e")
        .edge("l0", "a", "b", 1.0)
        .edge("l1", "b", "c", 1.0)
        .edge("l2", "c", "d", 1.0)
        .edge("l3", "d", "e", 1.0)
        .edge("stalk", "a", "lh", 1.0)
        .edge("lloop", "lh", "lh", 2.0)
        .edge("r0", "e", "rh", 1.0)
        .edge("ra", "rh", "rt", 1.5)
        .edge("rb", "rh", "rt", 1.5)
        .halfline("h2", "rt")
        .edge("d0", "b", "up", 1.0)
        .edge("d1", "up", "d", 1.0)
        .edge("d2", "b", "down", 1.0)
        .edge("d3", "down", "d", 1.0)
        .edge("d4", "down", "up", 1.0)
        .build()
        .expect("catalogue graph is valid")
}

/// Graphs shared by the topology cross-checks and the level tests.
pub fn corpus() -> Vec<(String, MetricGraph)> {
    let mut out: Vec<(String, MetricGraph)> = Vec::new();
    let mut push = |name: &str, g: Result<MetricGraph>| {
        out.push((String::from(name), g.expect("corpus graph is valid")));
    };
    push("line", Ok(line()));
    push("halfline", Ok(halfline()));
    push("star3", star(3));
    push("star4", star(4));
    push("bridge2", bridge(&[2.0, 2.0]));
    push("bridge3", bridge(&[1.0, 2.0, 3.0]));
    push("pendant_line", pendant_line(1.0));
    push("signpost", signpost(1.0, 2.0 * crate::math::PI));
    push("tadpole", tadpole(2.0 * crate::math::PI));
    push("fork3", fork(&[1.0, 1.0, 1.0]));
    push("tower1", bubble_tower(&[1.5]));
    push("tower2", bubble_tower(&[1.0, 2.5]));
    push("tower3", bubble_tower(&[0.5, 1.5, 2.0]));
    push("g_ell", g_ell(1.0));
    for n in 3..=8 {
        push(&format!("fork{n}_small"), n_fork(n, 0.2));
    }
    out
}
