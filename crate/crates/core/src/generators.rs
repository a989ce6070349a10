//! Truncations of the standard example families: Bethe lattices, antitrees,
//! the sparse tree with pendant bundles, and ℓ¹-balls of ℤ^d.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Condition, Edge, MetricGraph, Vertex};

/// Default cap on the number of edges a sparse-tree truncation may allocate.
pub const DEFAULT_EDGE_BUDGET: u64 = 10_000_000;

fn interior(id: usize, sphere: usize, ambient_degree: usize) -> Vertex {
    Vertex { id, sphere, ambient_degree, condition: Condition::Kirchhoff, frontier: false }
}

fn frontier(id: usize, sphere: usize, ambient_degree: usize) -> Vertex {
    Vertex { id, sphere, ambient_degree, condition: Condition::Dirichlet, frontier: true }
}

fn needs_degree_two(vertices: &[Vertex]) -> bool {
    vertices.iter().any(|v| !v.frontier && v.ambient_degree == 2)
}

/// Equilateral Bethe lattice T_β truncated at `depth`.
pub fn bethe(beta: usize, depth: usize) -> Result<MetricGraph> {
    bethe_with_lengths(beta, depth, |_| 1.0)
}

/// Bethe lattice whose edges from sphere n to sphere n+1 have length `length(n)`.
pub fn bethe_with_lengths(
    beta: usize,
    depth: usize,
    length: impl Fn(usize) -> f64,
) -> Result<MetricGraph> {
    if beta < 3 {
        return Err(Error::Parameter(format!("bethe needs beta >= 3, got {beta}")));
    }
    if depth < 1 {
        return Err(Error::Parameter("bethe needs depth >= 1".into()));
    }
    let mut vertices = vec![interior(0, 0, beta)];
    let mut edges = Vec::new();
    let mut layer = vec![0usize];
    for n in 0..depth {
        let children = if n == 0 { beta } else { beta - 1 };
        let len = length(n);
        let mut next = Vec::with_capacity(layer.len() * children);
        for &parent in &layer {
            for _ in 0..children {
                let id = vertices.len();
                vertices.push(if n + 1 == depth {
                    frontier(id, n + 1, beta)
                } else {
                    interior(id, n + 1, beta)
                });
                edges.push(Edge { id: edges.len(), source: parent, target: id, length: len });
                next.push(id);
            }
        }
        layer = next;
    }
    MetricGraph::new(vertices, edges, 0, false)
}

/// Antitree with sphere sizes (n+1)^q and lengths (n+1)^{-s} between S_n and S_{n+1}.
pub fn antitree(q: u32, s: f64, depth: usize) -> Result<MetricGraph> {
    if q < 1 {
        return Err(Error::Parameter(format!("antitree needs q >= 1, got {q}")));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Parameter(format!("antitree needs s >= 0, got {s}")));
    }
    let sizes: Vec<usize> = (0..depth + 2).map(|n| (n + 1).pow(q)).collect();
    let lengths: Vec<f64> = (0..depth).map(|n| ((n + 1) as f64).powf(-s)).collect();
    antitree_from_sequences(&sizes, &lengths, depth)
}

/// Antitree from explicit sphere sizes `sizes[n] = #S_n` and lengths
/// `lengths[n]` of the edges joining S_n to S_{n+1}. `sizes` must extend
/// one sphere past `depth` so the frontier's ambient degree is known.
pub fn antitree_from_sequences(sizes: &[usize], lengths: &[f64], depth: usize) -> Result<MetricGraph> {
    if depth < 1 {
        return Err(Error::Parameter("antitree needs depth >= 1".into()));
    }
    if sizes.len() < depth + 2 || lengths.len() < depth {
        return Err(Error::Parameter(format!(
            "antitree of depth {depth} needs {} sphere sizes and {depth} lengths",
            depth + 2
        )));
    }
    if sizes[0] != 1 || sizes.iter().any(|&s| s == 0) {
        return Err(Error::Parameter("antitree needs s_0 = 1 and s_n >= 1".into()));
    }
    let mut vertices = Vec::new();
    let mut spheres: Vec<Vec<usize>> = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let ambient = if n == 0 { sizes[1] } else { sizes[n - 1] + sizes[n + 1] };
        let ids: Vec<usize> = (vertices.len()..vertices.len() + sizes[n]).collect();
        for &id in &ids {
            vertices.push(if n == depth { frontier(id, n, ambient) } else { interior(id, n, ambient) });
        }
        spheres.push(ids);
    }
    let mut edges = Vec::new();
    for n in 0..depth {
        for &u in &spheres[n] {
            for &w in &spheres[n + 1] {
                edges.push(Edge { id: edges.len(), source: u, target: w, length: lengths[n] });
            }
        }
    }
    let allow = needs_degree_two(&vertices);
    MetricGraph::new(vertices, edges, 0, allow)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SparseTreeOptions {
    /// Condition placed at pendant leaves.
    pub pendant_condition: Condition,
    pub edge_budget: u64,
}

impl Default for SparseTreeOptions {
    fn default() -> Self {
        SparseTreeOptions { pendant_condition: Condition::Neumann, edge_budget: DEFAULT_EDGE_BUDGET }
    }
}

/// Number of pendant edges attached at spine vertex `v_n`, `n ≥ 1`.
pub fn sparse_tree_pendants(n: usize) -> Option<u64> {
    let j = (n as f64).sqrt().round() as usize;
    if j * j == n {
        1u64.checked_shl(n as u32)
    } else {
        Some(1)
    }
}

/// Equilateral half-line v_0, v_1, ... with 2^{j²} pendants at v_{j²} and
/// one pendant at every other v_n, n ≥ 1. Spine vertices have ids 0..=depth.
pub fn sparse_tree(depth: usize, opts: SparseTreeOptions) -> Result<MetricGraph> {
    if depth < 1 {
        return Err(Error::Parameter("sparse tree of depth 0 has no edges".into()));
    }
    let mut total = depth as u64;
    for n in 1..=depth {
        let p = sparse_tree_pendants(n).ok_or(Error::Resource {
            examined: 0,
            estimate: 2f64.powi(n as i32),
        })?;
        total = total.saturating_add(p);
    }
    if total > opts.edge_budget {
        return Err(Error::Resource { examined: 0, estimate: total as f64 });
    }
    if opts.pendant_condition == Condition::Kirchhoff {
        return Err(Error::Parameter("pendant condition must be dirichlet or neumann".into()));
    }

    let mut vertices = Vec::with_capacity(total as usize + 1);
    vertices.push(interior(0, 0, 1));
    for n in 1..=depth {
        let ambient = 2 + sparse_tree_pendants(n).unwrap() as usize;
        vertices.push(if n == depth { frontier(n, n, ambient) } else { interior(n, n, ambient) });
    }
    let mut edges: Vec<Edge> =
        (0..depth).map(|n| Edge { id: n, source: n, target: n + 1, length: 1.0 }).collect();
    for n in 1..=depth {
        for _ in 0..sparse_tree_pendants(n).unwrap() {
            let id = vertices.len();
            vertices.push(Vertex {
                id,
                sphere: n + 1,
                ambient_degree: 1,
                condition: opts.pendant_condition,
                frontier: false,
            });
            edges.push(Edge { id: edges.len(), source: n, target: id, length: 1.0 });
        }
    }
    MetricGraph::new(vertices, edges, 0, false)
}

/// Lattice points of ℤ^d with ℓ¹ norm ≤ radius, ordered by (norm, lexicographic).
pub fn lattice_points(d: usize, radius: usize) -> Vec<Vec<i64>> {
    fn rec(d: usize, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for x in -budget..=budget {
            prefix.push(x);
            rec(d, budget - x.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, radius as i64, &mut Vec::with_capacity(d), &mut out);
    out.sort_by_key(|p| (p.iter().map(|x| x.abs()).sum::<i64>(), p.clone()));
    out
}

/// ℓ¹-ball of radius `radius` in ℤ^d with uniform edge length.
pub fn lattice(d: usize, radius: usize, length: f64) -> Result<MetricGraph> {
    if d < 1 || radius < 1 {
        return Err(Error::Parameter(format!("lattice needs d >= 1 and radius >= 1, got {d}, {radius}")));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::Parameter(format!("lattice length must be positive, got {length}")));
    }
    let points = lattice_points(d, radius);
    let index: HashMap<&[i64], usize> =
        points.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let norm = |p: &[i64]| p.iter().map(|x| x.unsigned_abs() as usize).sum::<usize>();
    let vertices: Vec<Vertex> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let r = norm(p);
            if r == radius {
                frontier(i, r, 2 * d)
            } else {
                interior(i, r, 2 * d)
            }
        })
        .collect();
    let mut edges = Vec::new();
    let mut q = vec![0i64; d];
    for (i, p) in points.iter().enumerate() {
        let r = norm(p);
        for axis in 0..d {
            for step in [-1i64, 1] {
                q.copy_from_slice(p);
                q[axis] += step;
                if norm(&q) != r + 1 {
                    continue;
                }
                if let Some(&j) = index.get(q.as_slice()) {
                    edges.push(Edge { id: edges.len(), source: i, target: j, length });
                }
            }
        }
    }
    let allow = needs_degree_two(&vertices);
    MetricGraph::new(vertices, edges, 0, allow)
}

/// Parametric description of a family member, serializable for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Bethe { beta: usize, depth: usize },
    Antitree { q: u32, s: f64, depth: usize },
    SparseTree { depth: usize },
    Lattice { dim: usize, radius: usize, length: f64 },
}

impl FamilySpec {
    pub fn generate(&self) -> Result<MetricGraph> {
        match *self {
            FamilySpec::Bethe { beta, depth } => bethe(beta, depth),
            FamilySpec::Antitree { q, s, depth } => antitree(q, s, depth),
            FamilySpec::SparseTree { depth } => sparse_tree(depth, SparseTreeOptions::default()),
            FamilySpec::Lattice { dim, radius, length } => lattice(dim, radius, length),
        }
    }

    pub fn depth(&self) -> usize {
        match *self {
            FamilySpec::Bethe { depth, .. }
            | FamilySpec::Antitree { depth, .. }
            | FamilySpec::SparseTree { depth } => depth,
            FamilySpec::Lattice { radius, .. } => radius,
        }
    }

    /// Same family at another truncation depth.
    pub fn with_depth(&self, depth: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            FamilySpec::Bethe { depth: d, .. }
            | FamilySpec::Antitree { depth: d, .. }
            | FamilySpec::SparseTree { depth: d } => *d = depth,
            FamilySpec::Lattice { radius, .. } => *radius = depth,
        }
        out
    }

    /// Total length of the infinite graph when finite.
    pub fn total_volume(&self) -> Option<f64> {
        match *self {
            FamilySpec::Antitree { q, s, .. } => antitree_total_volume(q, s),
            _ => None,
        }
    }
}

/// mes(A) = Σ_n s_n s_{n+1} (n+1)^{-s} for the default antitree; finite iff s > 2q + 1.
pub fn antitree_total_volume(q: u32, s: f64) -> Option<f64> {
    let q = q as i32;
    let p = 2.0 * q as f64 - s;
    if p >= -1.0 {
        return None;
    }
    const TERMS: usize = 1_000_000;
    let mut sum = 0.0;
    for n in (0..TERMS).rev() {
        let x = (n + 1) as f64;
        sum += x.powi(q) * (x + 1.0).powi(q) * x.powf(-s);
    }
    // Tail Σ_{x > X} x^p (1 + 1/x)^q ≈ ∫_{X+1/2}^∞ x^p (1 + q/x) dx.
    let x0 = TERMS as f64 + 0.5;
    let tail = x0.powf(p + 1.0) / (-(p + 1.0)) + q as f64 * x0.powf(p) / (-p);
    Some(sum + tail)
}
