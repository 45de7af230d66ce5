//! Graph files, function CSVs and JSON reports.
//!
//! Function CSV layout: header `edge,index,x,value`, one row per node of each
//! edge in mesh order, `x` the arc length from the edge's first endpoint.
//! Vertex values therefore appear once per incident edge.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nlsgraph_core::graph::{build_graph, GraphDescription};
use nlsgraph_core::{GraphFunction, Mesh, MetricGraph};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Largest disagreement tolerated between copies of one vertex value.
pub const VERTEX_TOLERANCE: f64 = 1e-9;

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn parse_graph(text: &str) -> Result<MetricGraph> {
    let desc: GraphDescription =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("graph: {e}")))?;
    build_graph(&desc).map_err(CliError::InvalidGraph)
}

pub fn read_graph(path: &Path) -> Result<MetricGraph> {
    parse_graph(&read_text(path)?).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn graph_json(g: &MetricGraph) -> String {
    serde_json::to_string_pretty(&g.to_description()).expect("graph description serializes")
}

pub fn write_graph(path: &Path, g: &MetricGraph) -> Result<()> {
    write_text(path, &(graph_json(g) + "\n"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Parse(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Writes records through the `csv` crate into a string.
pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRow {
    pub edge: String,
    pub index: usize,
    pub x: f64,
    pub value: f64,
}

pub fn function_rows(u: &GraphFunction) -> Vec<NodeRow> {
    let mesh = u.mesh();
    let base = mesh.graph().base();
    let mut rows = Vec::with_capacity(u.values().len() + mesh.edges().len());
    for (i, em) in mesh.edges().iter().enumerate() {
        let id = &base.edges()[i].id;
        for (k, v) in u.edge_values(i).into_iter().enumerate() {
            rows.push(NodeRow {
                edge: id.clone(),
                index: k,
                x: k as f64 * em.h,
                value: v,
            });
        }
    }
    rows
}

pub fn function_csv(u: &GraphFunction) -> Result<String> {
    csv_string(&function_rows(u))
}

pub fn write_function(path: &Path, u: &GraphFunction) -> Result<()> {
    write_text(path, &function_csv(u)?)
}

/// Samples of one edge read back from a function CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSamples {
    pub edge: String,
    pub x: Vec<f64>,
    pub values: Vec<f64>,
}

impl EdgeSamples {
    /// Node spacing, checked to be uniform.
    pub fn spacing(&self) -> Result<f64> {
        if self.x.len() < 2 {
            return Err(CliError::Parse(format!("edge `{}` has fewer than two nodes", self.edge)));
        }
        let h = self.x[1] - self.x[0];
        let uniform = self
            .x
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.max(1.0));
        if !(h > 0.0) || !uniform {
            return Err(CliError::Parse(format!("edge `{}` is not uniformly sampled", self.edge)));
        }
        Ok(h)
    }
}

pub fn parse_function_csv(text: &str) -> Result<Vec<EdgeSamples>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| CliError::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["edge", "index", "x", "value"] {
        return Err(CliError::Parse(String::from(
            "function CSV header must be `edge,index,x,value`",
        )));
    }
    let mut order: Vec<String> = Vec::new();
    let mut by_edge: BTreeMap<String, Vec<NodeRow>> = BTreeMap::new();
    for row in r.deserialize() {
        let row: NodeRow = row.map_err(|e| CliError::Parse(e.to_string()))?;
        if !by_edge.contains_key(&row.edge) {
            order.push(row.edge.clone());
        }
        by_edge.entry(row.edge.clone()).or_default().push(row);
    }
    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let mut rows = by_edge.remove(&id).expect("edge seen");
        rows.sort_by_key(|r| r.index);
        if rows.iter().enumerate().any(|(k, r)| r.index != k) {
            return Err(CliError::Parse(format!("edge `{id}` has missing or repeated indices")));
        }
        out.push(EdgeSamples {
            edge: id,
            x: rows.iter().map(|r| r.x).collect(),
            values: rows.iter().map(|r| r.value).collect(),
        });
    }
    Ok(out)
}

pub fn read_function_samples(path: &Path) -> Result<Vec<EdgeSamples>> {
    parse_function_csv(&read_text(path)?)
}

/// Rebuilds a function on `mesh` from CSV samples; every mesh edge must be
/// present and vertex copies must agree to [`VERTEX_TOLERANCE`].
pub fn function_on_mesh(mesh: Arc<Mesh>, samples: &[EdgeSamples]) -> Result<GraphFunction> {
    let base = mesh.graph().base();
    let mut per_edge = Vec::with_capacity(mesh.edges().len());
    for e in base.edges() {
        let s = samples
            .iter()
            .find(|s| s.edge == e.id)
            .ok_or_else(|| CliError::Parse(format!("edge `{}` missing from function CSV", e.id)))?;
        per_edge.push(s.values.clone());
    }
    if samples.len() != base.edges().len() {
        return Err(CliError::Parse(String::from("function CSV names edges not in the graph")));
    }
    GraphFunction::from_edge_samples(mesh, &per_edge, VERTEX_TOLERANCE).map_err(|e| CliError::Parse(e.to_string()))
}

/// Appends a line to a writer, mapping failures to `IO_ERROR` on `label`.
pub fn emit(out: &mut dyn Write, label: &Path, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io(label, e))
}
