//! Metric multigraphs with halflines, validation, and truncation.
//!
//! A halfline is stored as an ordinary edge between a finite root and a
//! degree-one vertex flagged `at_infinity`. After validation every halfline is
//! oriented root → infinity, so `edge.a` is always the finite end.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EdgeLength {
    Finite(f64),
    Halfline,
}

impl EdgeLength {
    pub fn finite(self) -> Option<f64> {
        match self {
            EdgeLength::Finite(l) => Some(l),
            EdgeLength::Halfline => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vertex {
    pub id: String,
    pub at_infinity: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    pub id: String,
    pub a: usize,
    pub b: usize,
    pub length: EdgeLength,
}

impl Edge {
    pub fn is_halfline(&self) -> bool {
        matches!(self.length, EdgeLength::Halfline)
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }

    /// The endpoint opposite to `v` (for a loop, `v` itself).
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

/// Vertex record of the on-disk graph description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(deny_unknown_fields)
)]
pub struct VertexSpec {
    pub id: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "core::ops::Not::not"))]
    pub infinity: bool,
}

/// Edge record of the on-disk graph description. Exactly one of `length`
/// and `halfline` must be given.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(deny_unknown_fields)
)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub length: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "core::ops::Not::not"))]
    pub halfline: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(deny_unknown_fields)
)]
pub struct GraphDescription {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
}

/// Validated metric multigraph. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Validates a description and builds the graph.
pub fn build_graph(desc: &GraphDescription) -> Result<MetricGraph> {
    if desc.vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut vertices: Vec<Vertex> = Vec::with_capacity(desc.vertices.len());
    for v in &desc.vertices {
        if vertices.iter().any(|w| w.id == v.id) {
            return Err(Error::DuplicateId(v.id.clone()));
        }
        vertices.push(Vertex {
            id: v.id.clone(),
            at_infinity: v.infinity,
        });
    }
    let lookup = |id: &str| {
        vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    };

    let mut edges: Vec<Edge> = Vec::with_capacity(desc.edges.len());
    for e in &desc.edges {
        if edges.iter().any(|f| f.id == e.id) || vertices.iter().any(|v| v.id == e.id) {
            return Err(Error::DuplicateId(e.id.clone()));
        }
        let mut a = lookup(&e.from)?;
        let mut b = lookup(&e.to)?;
        let length = match (e.length, e.halfline) {
            (Some(l), false) => EdgeLength::Finite(l),
            (None, true) => EdgeLength::Halfline,
            _ => {
                return Err(Error::InvalidEdgeSpec(format!(
                    "edge {} needs exactly one of length or halfline",
                    e.id
                )))
            }
        };
        let (ia, ib) = (vertices[a].at_infinity, vertices[b].at_infinity);
        if a == b && ia {
            return Err(Error::SelfLoopAtInfinity(e.id.clone()));
        }
        if ia && ib {
            return Err(Error::InfinityToInfinityEdge(e.id.clone()));
        }
        match length {
            EdgeLength::Halfline => {
                if !(ia || ib) {
                    return Err(Error::HalflineMismatch(e.id.clone()));
                }
                if ia {
                    core::mem::swap(&mut a, &mut b);
                }
            }
            EdgeLength::Finite(l) => {
                if ia || ib {
                    return Err(Error::HalflineMismatch(e.id.clone()));
                }
                if !(l > 0.0 && l.is_finite()) {
                    return Err(Error::NonpositiveLength(e.id.clone()));
                }
            }
        }
        edges.push(Edge {
            id: e.id.clone(),
            a,
            b,
            length,
        });
    }

    let g = MetricGraph { vertices, edges };
    for (i, v) in g.vertices.iter().enumerate() {
        if v.at_infinity && g.degree_of(i) != 1 {
            return Err(Error::InfinityDegreeViolation(v.id.clone()));
        }
    }
    if !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    Ok(g)
}

impl MetricGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Number of edge ends at vertex `id`; a loop counts twice.
    pub fn degree(&self, id: &str) -> Result<usize> {
        Ok(self.degree_of(self.vertex_index(id)?))
    }

    pub fn degree_of(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.a == v) as usize + (e.b == v) as usize)
            .sum()
    }

    pub fn num_halflines(&self) -> usize {
        self.edges.iter().filter(|e| e.is_halfline()).count()
    }

    pub fn finite_length(&self) -> f64 {
        self.edges.iter().filter_map(|e| e.length.finite()).sum()
    }

    /// Edge indices incident to `v`, loops listed once.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.a == v || e.b == v)
            .map(|(i, _)| i)
            .collect()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for e in &self.edges {
                if e.a == v || e.b == v {
                    let w = e.other(v);
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Description that rebuilds an identical graph.
    pub fn to_description(&self) -> GraphDescription {
        GraphDescription {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexSpec {
                    id: v.id.clone(),
                    infinity: v.at_infinity,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    from: self.vertices[e.a].id.clone(),
                    to: self.vertices[e.b].id.clone(),
                    length: e.length.finite(),
                    halfline: e.is_halfline(),
                })
                .collect(),
        }
    }

    /// Replaces every halfline by a finite edge of length `l` whose far end is
    /// a Dirichlet boundary vertex (the former vertex at infinity).
    pub fn truncate(&self, l: f64) -> Result<TruncatedGraph> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::NonpositiveTruncation);
        }
        let edges = self
            .edges
            .iter()
            .map(|e| TruncatedEdge {
                a: e.a,
                b: e.b,
                length: e.length.finite().unwrap_or(l),
                halfline: e.is_halfline(),
            })
            .collect();
        let boundary = self.vertices.iter().map(|v| v.at_infinity).collect();
        Ok(TruncatedGraph {
            base: self.clone(),
            truncation_length: l,
            edges,
            boundary,
        })
    }

    /// Shortest-path distances between finite vertices through finite edges.
    /// Infinity vertices stay at `f64::INFINITY`.
    pub fn core_distances(&self) -> Vec<Vec<f64>> {
        let n = self.vertices.len();
        let mut d = vec![vec![f64::INFINITY; n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.at_infinity {
                d[i][i] = 0.0;
            }
        }
        for e in &self.edges {
            if let EdgeLength::Finite(l) = e.length {
                if l < d[e.a][e.b] {
                    d[e.a][e.b] = l;
                    d[e.b][e.a] = l;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }

    /// Diameter (over points, not just vertices) and total length of the
    /// compact core, i.e. the graph with its halflines removed.
    pub fn compact_core_metrics(&self) -> Result<(f64, f64)> {
        let finite: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .filter_map(|e| e.length.finite().map(|l| (e.a, e.b, l)))
            .collect();
        if finite.is_empty() {
            return Err(Error::EmptyCompactCore);
        }
        let d = self.core_distances();
        let mut diam: f64 = 0.0;
        for (i, &(a, b, l1)) in finite.iter().enumerate() {
            diam = diam.max(0.5 * (d[a][b] + l1));
            for &(c, dd, l2) in finite.iter().skip(i + 1) {
                // Farthest point of the second edge from x, as a function of x's
                // position s on the first edge; concave and piecewise linear.
                let at = |s: f64| {
                    let to_c = (s + d[a][c]).min(l1 - s + d[b][c]);
                    let to_d = (s + d[a][dd]).min(l1 - s + d[b][dd]);
                    0.5 * (to_c + to_d + l2)
                };
                let mut candidates = [
                    0.0,
                    l1,
                    0.5 * (l1 + d[b][c] - d[a][c]),
                    0.5 * (l1 + d[b][dd] - d[a][dd]),
                ];
                for s in candidates.iter_mut() {
                    *s = s.clamp(0.0, l1);
                }
                for s in candidates {
                    diam = diam.max(at(s));
                }
            }
        }
        Ok((diam, finite.iter().map(|f| f.2).sum()))
    }
}

/// Convenience builder used by the shape catalogue and tests.
#[derive(Debug, Default, Clone)]
pub struct GraphBuilder {
    desc: GraphDescription,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: &str) -> Self {
        self.desc.vertices.push(VertexSpec {
            id: id.to_string(),
            infinity: false,
        });
        self
    }

    pub fn infinity(mut self, id: &str) -> Self {
        self.desc.vertices.push(VertexSpec {
            id: id.to_string(),
            infinity: true,
        });
        self
    }

    pub fn edge(mut self, id: &str, from: &str, to: &str, length: f64) -> Self {
        self.desc.edges.push(EdgeSpec {
            id: id.to_string(),
            from: from.to_string(),
            to: to.to_string(),
            length: Some(length),
            halfline: false,
        });
        self
    }

    /// Adds a halfline rooted at `root` together with its vertex at infinity,
    /// named `<id>_inf`.
    pub fn halfline(self, id: &str, root: &str) -> Self {
        let inf = format!("{id}_inf");
        let mut s = self.infinity(&inf);
        s.desc.edges.push(EdgeSpec {
            id: id.to_string(),
            from: root.to_string(),
            to: inf,
            length: None,
            halfline: true,
        });
        s
    }

    pub fn description(&self) -> &GraphDescription {
        &self.desc
    }

    pub fn build(self) -> Result<MetricGraph> {
        build_graph(&self.desc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedEdge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    /// Former halfline; `b` is then the boundary vertex.
    pub halfline: bool,
}

/// Finite computational domain: halflines cut at `truncation_length`, with
/// their vertices at infinity turned into Dirichlet boundary vertices. Vertex
/// and edge indices are those of the base graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedGraph {
    base: MetricGraph,
    truncation_length: f64,
    edges: Vec<TruncatedEdge>,
    boundary: Vec<bool>,
}

impl TruncatedGraph {
    pub fn base(&self) -> &MetricGraph {
        &self.base
    }

    pub fn truncation_length(&self) -> f64 {
        self.truncation_length
    }

    pub fn edges(&self) -> &[TruncatedEdge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Shortest distance from every vertex to `src` along edges.
    pub fn vertex_distances(&self, src: usize) -> Vec<f64> {
        let n = self.num_vertices();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[src] = 0.0;
        for _ in 0..n {
            let mut best = None;
            for v in 0..n {
                if !done[v] && dist[v].is_finite() && best.is_none_or(|b: usize| dist[v] < dist[b]) {
                    best = Some(v);
                }
            }
            let Some(v) = best else { break };
            done[v] = true;
            for e in &self.edges {
                if e.a == v || e.b == v {
                    let w = if e.a == v { e.b } else { e.a };
                    let nd = dist[v] + e.length;
                    if nd < dist[w] {
                        dist[w] = nd;
                    }
                }
            }
        }
        dist
    }
}
