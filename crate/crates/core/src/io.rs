//! `mgraph/1` interchange files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{Condition, Edge, MetricGraph, Vertex};

pub const MGRAPH_FORMAT: &str = "mgraph/1";

fn condition_name(c: Condition) -> &'static str {
    match c {
        Condition::Kirchhoff => "kirchhoff",
        Condition::Dirichlet => "dirichlet",
        Condition::Neumann => "neumann",
    }
}

/// Deterministic serialization: one vertex or edge per line, lengths with
/// 17 significant digits.
pub fn to_mgraph_string(g: &MetricGraph) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"format\": \"{MGRAPH_FORMAT}\",");
    let _ = writeln!(s, "  \"root\": {},", g.root());
    if g.allow_degree_two() {
        s.push_str("  \"allow_degree_two\": true,\n");
    }
    s.push_str("  \"vertices\": [\n");
    for (i, v) in g.vertices().iter().enumerate() {
        let _ = write!(
            s,
            "    {{\"id\": {}, \"sphere\": {}, \"ambient_degree\": {}, \"condition\": \"{}\", \"frontier\": {}}}",
            v.id,
            v.sphere,
            v.ambient_degree,
            condition_name(v.condition),
            v.frontier
        );
        s.push_str(if i + 1 < g.num_vertices() { ",\n" } else { "\n" });
    }
    s.push_str("  ],\n  \"edges\": [\n");
    for (i, e) in g.edges().iter().enumerate() {
        let _ = write!(
            s,
            "    {{\"id\": {}, \"source\": {}, \"target\": {}, \"length\": {:.16e}}}",
            e.id, e.source, e.target, e.length
        );
        s.push_str(if i + 1 < g.num_edges() { ",\n" } else { "\n" });
    }
    s.push_str("  ]\n}\n");
    s
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MgraphFile {
    format: String,
    root: usize,
    #[serde(default)]
    allow_degree_two: bool,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Parses and validates an `mgraph/1` document.
pub fn from_mgraph_str(text: &str) -> Result<MetricGraph> {
    let file: MgraphFile = serde_json::from_str(text)?;
    if file.format != MGRAPH_FORMAT {
        return Err(Error::Format(format!("expected format {MGRAPH_FORMAT}, found {}", file.format)));
    }
    MetricGraph::new(file.vertices, file.edges, file.root, file.allow_degree_two)
}

pub fn save(g: &MetricGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_mgraph_string(g))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<MetricGraph> {
    from_mgraph_str(&fs::read_to_string(path)?)
}
