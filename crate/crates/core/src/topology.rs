//! Terminal edges, the halfline-covering condition in its three equivalent
//! forms, bubble-tower recognition, and the four-way case split used in the
//! critical regime.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "SCREAMING_SNAKE_CASE")
)]
pub enum CaseLabel {
    Terminal,
    AssumptionH,
    SingleHalfline,
    Other,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Terminal => "TERMINAL",
            CaseLabel::AssumptionH => "ASSUMPTION_H",
            CaseLabel::SingleHalfline => "SINGLE_HALFLINE",
            CaseLabel::Other => "OTHER",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TopologyReport {
    pub num_halflines: usize,
    pub terminal_edges: Vec<String>,
    #[cfg_attr(feature = "serde", serde(rename = "satisfies_H"))]
    pub satisfies_h: bool,
    #[cfg_attr(feature = "serde", serde(rename = "h_violation_witness"))]
    pub h_violation_witness: Option<String>,
    pub case_label: CaseLabel,
    pub is_bubble_tower: bool,
    pub is_line: bool,
}

/// Edges with an endpoint of degree one that is not at infinity. This
/// includes the halfline itself, whose origin is a terminal point.
pub fn terminal_edges(g: &MetricGraph) -> Vec<String> {
    let v = g.vertices();
    g.edges()
        .iter()
        .filter(|e| !e.is_loop())
        .filter(|e| {
            [e.a, e.b]
                .iter()
                .any(|&x| !v[x].at_infinity && g.degree_of(x) == 1)
        })
        .map(|e| e.id.clone())
        .collect()
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Edge-removal form: after deleting any single edge, every connected
/// component still contains a vertex at infinity. Returns a violating edge
/// when the condition fails.
pub fn satisfies_h(g: &MetricGraph) -> (bool, Option<String>) {
    let n = g.vertices().len();
    for (skip, edge) in g.edges().iter().enumerate() {
        let mut dsu = Dsu::new(n);
        for (i, e) in g.edges().iter().enumerate() {
            if i != skip {
                dsu.union(e.a, e.b);
            }
        }
        let mut has_inf = vec![false; n];
        for (i, v) in g.vertices().iter().enumerate() {
            if v.at_infinity {
                let r = dsu.find(i);
                has_inf[r] = true;
            }
        }
        let bad = (0..n).any(|i| {
            let r = dsu.find(i);
            !has_inf[r]
        });
        if bad {
            return (false, Some(edge.id.clone()));
        }
    }
    if g.num_halflines() < 2 {
        return (false, None);
    }
    (true, None)
}

/// Cycle-covering form: identify all vertices at infinity into one vertex and
/// ask that no edge of the resulting multigraph be a bridge.
pub fn satisfies_h_cycle(g: &MetricGraph) -> bool {
    if g.num_halflines() == 0 {
        return false;
    }
    let n = g.vertices().len();
    let omega = n;
    let map = |v: usize| if g.vertices()[v].at_infinity { omega } else { v };
    let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (map(e.a), map(e.b))).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (i, &(a, b)) in ends.iter().enumerate() {
        adj[a].push((b, i));
        if a != b {
            adj[b].push((a, i));
        }
    }
    let mut disc = vec![usize::MAX; n + 1];
    let mut low = vec![0usize; n + 1];
    let mut timer = 0usize;
    // Iterative DFS: (vertex, edge used to enter, next adjacency index).
    let mut stack: Vec<(usize, usize, usize)> = vec![(omega, usize::MAX, 0)];
    disc[omega] = 0;
    low[omega] = 0;
    timer += 1;
    while let Some(top) = stack.last_mut() {
        let (v, via) = (top.0, top.1);
        if top.2 < adj[v].len() {
            let (w, eid) = adj[v][top.2];
            top.2 += 1;
            if eid == via {
                continue;
            }
            if disc[w] == usize::MAX {
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                stack.push((w, eid, 0));
            } else {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(parent, _, _)) = stack.last() {
                low[parent] = low[parent].min(low[v]);
                if low[v] > disc[parent] {
                    return false;
                }
            }
        }
    }
    true
}

/// Trail form, by exhaustive search: every edge lies on an edge-simple trail
/// that starts and ends with a halfline.
pub fn satisfies_h_trail(g: &MetricGraph, edge_cap: usize) -> Result<bool> {
    let m = g.edges().len();
    if m > edge_cap {
        return Err(Error::TooLargeForBruteForce { edges: m, cap: edge_cap });
    }
    if g.num_halflines() < 2 {
        return Ok(false);
    }
    let mut covered = vec![false; m];
    let mut used = vec![false; m];
    let mut path: Vec<usize> = Vec::new();
    for (start, v) in g.vertices().iter().enumerate() {
        if v.at_infinity {
            trail_search(g, start, start, &mut used, &mut path, &mut covered);
            if covered.iter().all(|&c| c) {
                return Ok(true);
            }
        }
    }
    Ok(covered.iter().all(|&c| c))
}

fn trail_search(
    g: &MetricGraph,
    start: usize,
    at: usize,
    used: &mut [bool],
    path: &mut Vec<usize>,
    covered: &mut [bool],
) {
    if at != start && g.vertices()[at].at_infinity {
        for &e in path.iter() {
            covered[e] = true;
        }
        return;
    }
    if covered.iter().all(|&c| c) {
        return;
    }
    for (i, e) in g.edges().iter().enumerate() {
        if used[i] || (e.a != at && e.b != at) {
            continue;
        }
        let next = e.other(at);
        used[i] = true;
        path.push(i);
        trail_search(g, start, next, used, path, covered);
        path.pop();
        used[i] = false;
    }
}

/// Two halflines joined by a path of finite edges whose inner vertices all
/// have degree two (the line, possibly subdivided).
pub fn is_line(g: &MetricGraph) -> bool {
    if g.num_halflines() != 2 {
        return false;
    }
    let v = g.vertices();
    let finite_vertices: Vec<usize> = (0..v.len()).filter(|&i| !v[i].at_infinity).collect();
    if g.edges().iter().any(|e| e.is_loop()) {
        return false;
    }
    // A tree in which every finite vertex has degree two, counting halflines.
    let finite_edges = g.edges().iter().filter(|e| !e.is_halfline()).count();
    finite_edges + 1 == finite_vertices.len()
        && finite_vertices.iter().all(|&i| g.degree_of(i) == 2)
}

/// The line with finitely many pairs of opposite points identified: a root
/// carrying both halflines, a chain of vertices joined by pairs of parallel
/// edges of equal length, and a loop on the last vertex. The line itself is
/// the tower with no bubbles.
pub fn is_bubble_tower(g: &MetricGraph) -> bool {
    if is_line(g) {
        return true;
    }
    let halflines: Vec<&crate::graph::Edge> =
        g.edges().iter().filter(|e| e.is_halfline()).collect();
    if halflines.len() != 2 || halflines[0].a != halflines[1].a {
        return false;
    }
    let m = g.edges().len();
    let mut used = vec![false; m];
    for (i, e) in g.edges().iter().enumerate() {
        used[i] = e.is_halfline();
    }
    let mut visited = vec![false; g.vertices().len()];
    let mut at = halflines[0].a;
    loop {
        visited[at] = true;
        let open: Vec<usize> = (0..m)
            .filter(|&i| !used[i] && (g.edges()[i].a == at || g.edges()[i].b == at))
            .collect();
        match open.as_slice() {
            [l] if g.edges()[*l].is_loop() => {
                used[*l] = true;
                break;
            }
            [p, q] => {
                let (ep, eq) = (&g.edges()[*p], &g.edges()[*q]);
                if ep.is_loop() || eq.is_loop() {
                    return false;
                }
                let next = ep.other(at);
                if eq.other(at) != next || visited[next] {
                    return false;
                }
                let (lp, lq) = (ep.length.finite().unwrap(), eq.length.finite().unwrap());
                if (lp - lq).abs() > 1e-12 * lp.max(lq) {
                    return false;
                }
                used[*p] = true;
                used[*q] = true;
                at = next;
            }
            _ => return false,
        }
    }
    used.into_iter().all(|u| u)
}

pub fn classify_case(g: &MetricGraph) -> Result<TopologyReport> {
    let num_halflines = g.num_halflines();
    if num_halflines == 0 {
        return Err(Error::CompactGraph);
    }
    let terminal = terminal_edges(g);
    let (sat, witness) = satisfies_h(g);
    let case_label = if !terminal.is_empty() {
        CaseLabel::Terminal
    } else if sat {
        CaseLabel::AssumptionH
    } else if num_halflines == 1 {
        CaseLabel::SingleHalfline
    } else {
        CaseLabel::Other
    };
    Ok(TopologyReport {
        num_halflines,
        terminal_edges: terminal,
        satisfies_h: sat,
        h_violation_witness: witness,
        case_label,
        is_bubble_tower: is_bubble_tower(g),
        is_line: is_line(g),
    })
}
