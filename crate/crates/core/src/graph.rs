//! Finite truncations of metric graphs: vertices tagged with sphere index,
//! ambient degree and vertex condition; edges oriented by sphere order.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit;

/// Relative tolerance used for floating comparisons during validation.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Kirchhoff,
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub sphere: usize,
    pub ambient_degree: usize,
    pub condition: Condition,
    pub frontier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub source: usize,
    pub target: usize,
    pub length: f64,
}

impl Edge {
    /// The endpoint opposite to `v`.
    pub fn other(&self, v: usize) -> usize {
        if self.source == v {
            self.target
        } else {
            self.source
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Natural path metric, edge cost `|e|`.
    Rho0,
    /// Weighted path metric, edge cost `m(u) + m(v)`.
    Rhom,
}

/// A validated finite truncation. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    root: usize,
    adjacency: Vec<Vec<usize>>,
    allow_degree_two: bool,
}

impl MetricGraph {
    /// Validates every structural invariant and builds the adjacency lists.
    ///
    /// `allow_degree_two` lifts the ban on non-frontier vertices of ambient
    /// degree two (needed for paths, lattices in one dimension and antitree
    /// roots with a single child pair).
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        root: usize,
        allow_degree_two: bool,
    ) -> Result<Self> {
        let n = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::Validation(format!(
                    "vertex ids must be dense 0..n-1; position {i} holds id {}",
                    v.id
                )));
            }
            if v.ambient_degree == 0 {
                return Err(Error::Validation(format!("vertex {i} has ambient_degree 0")));
            }
        }
        if root >= n {
            return Err(Error::UnknownVertex(root));
        }
        if edges.is_empty() {
            return Err(Error::Validation("graph has no edges".into()));
        }

        let mut adjacency = vec![Vec::new(); n];
        let mut pairs = Vec::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::Validation(format!(
                    "edge ids must be dense 0..m-1; position {i} holds id {}",
                    e.id
                )));
            }
            if e.source >= n {
                return Err(Error::UnknownVertex(e.source));
            }
            if e.target >= n {
                return Err(Error::UnknownVertex(e.target));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::Validation(format!(
                    "edge {i} has length {}; each edge has finite positive length",
                    e.length
                )));
            }
            if e.source == e.target {
                return Err(Error::Validation(format!("edge {i} is a loop at vertex {}", e.source)));
            }
            if vertices[e.source].sphere > vertices[e.target].sphere {
                return Err(Error::Validation(format!(
                    "edge {i} is oriented from sphere {} to sphere {}",
                    vertices[e.source].sphere, vertices[e.target].sphere
                )));
            }
            adjacency[e.source].push(i);
            adjacency[e.target].push(i);
            let key = (e.source.min(e.target), e.source.max(e.target));
            pairs.push((key, i));
        }
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Validation(format!(
                    "edges {} and {} both join vertices {} and {}",
                    w[0].1, w[1].1, w[0].0 .0, w[0].0 .1
                )));
            }
        }

        for v in &vertices {
            let deg = adjacency[v.id].len();
            if deg > v.ambient_degree {
                return Err(Error::Validation(format!(
                    "vertex {} has degree {deg} above its ambient degree {}",
                    v.id, v.ambient_degree
                )));
            }
            if v.frontier != (deg < v.ambient_degree) {
                return Err(Error::Validation(format!(
                    "vertex {} has frontier={} but degree {deg} of ambient {}",
                    v.id, v.frontier, v.ambient_degree
                )));
            }
            if v.frontier && v.condition != Condition::Dirichlet {
                return Err(Error::Validation(format!(
                    "frontier vertex {} must carry the dirichlet condition",
                    v.id
                )));
            }
            if v.condition != Condition::Kirchhoff && !v.frontier && v.ambient_degree != 1 {
                return Err(Error::Validation(format!(
                    "vertex {} has a {:?} condition but is neither a loose end nor frontier",
                    v.id, v.condition
                )));
            }
            if !allow_degree_two && !v.frontier && v.ambient_degree == 2 {
                return Err(Error::Validation(format!(
                    "vertex {} has degree 2; all edges must be essential",
                    v.id
                )));
            }
        }

        let g = MetricGraph { vertices, edges, root, adjacency, allow_degree_two };
        let hops = g.hop_distances(root);
        if let Some(v) = hops.iter().position(|d| d.is_none()) {
            return Err(Error::Validation(format!("graph is disconnected; vertex {v} unreachable from root")));
        }
        for (v, d) in hops.iter().enumerate() {
            if d.unwrap() != g.vertices[v].sphere {
                return Err(Error::Validation(format!(
                    "vertex {v} has sphere {} but combinatorial distance {} to the root",
                    g.vertices[v].sphere,
                    d.unwrap()
                )));
            }
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn allow_degree_two(&self) -> bool {
        self.allow_degree_two
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, v: usize) -> Result<&Vertex> {
        self.vertices.get(v).ok_or(Error::UnknownVertex(v))
    }

    pub fn edge(&self, e: usize) -> Result<&Edge> {
        self.edges.get(e).ok_or(Error::UnknownEdge(e))
    }

    /// Incident edge ids of `v` in the truncation.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Truncated degree.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// `(edge id, neighbour)` pairs around `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency[v].iter().map(move |&e| (e, self.edges[e].other(v)))
    }

    pub fn is_dirichlet(&self, v: usize) -> bool {
        self.vertices[v].condition == Condition::Dirichlet
    }

    pub fn is_neumann(&self, v: usize) -> bool {
        self.vertices[v].condition == Condition::Neumann
    }

    pub fn max_sphere(&self) -> usize {
        self.vertices.iter().map(|v| v.sphere).max().unwrap_or(0)
    }

    /// Total length mes(G) of the truncation.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// True when every edge has length 1 (to relative tolerance).
    pub fn is_equilateral(&self) -> bool {
        self.edges.iter().all(|e| (e.length - 1.0).abs() <= REL_TOL)
    }

    /// Same graph with every length multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Parameter(format!("scale factor {c} must be positive")));
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length *= c;
        }
        Ok(g)
    }

    /// m(v): sum of incident edge lengths over the truncated star.
    pub fn vertex_weight(&self, v: usize) -> Result<f64> {
        self.vertex(v)?;
        Ok(self.weight_unchecked(v))
    }

    pub(crate) fn weight_unchecked(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&e| self.edges[e].length).sum()
    }

    /// m(v) for all vertices.
    pub fn vertex_weights(&self) -> Vec<f64> {
        (0..self.vertices.len()).map(|v| self.weight_unchecked(v)).collect()
    }

    /// Cost of traversing edge `e` under `metric`.
    pub fn edge_cost(&self, e: usize, metric: Metric) -> f64 {
        let edge = &self.edges[e];
        match metric {
            Metric::Rho0 => edge.length,
            Metric::Rhom => self.weight_unchecked(edge.source) + self.weight_unchecked(edge.target),
        }
    }

    /// Single-source shortest-path distances, indexed by vertex id.
    pub fn path_distances(&self, source: usize, metric: Metric) -> Result<Vec<f64>> {
        self.vertex(source)?;
        let costs: Vec<f64> = (0..self.edges.len()).map(|e| self.edge_cost(e, metric)).collect();
        Ok(self.shortest_paths(&[(source, 0.0)], &costs, f64::INFINITY))
    }

    /// Multi-source Dijkstra with per-edge costs. Vertices farther than
    /// `cutoff` keep distance `+inf`.
    pub fn shortest_paths(&self, seeds: &[(usize, f64)], costs: &[f64], cutoff: f64) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        for &(v, d) in seeds {
            if d < dist[v] && d <= cutoff {
                dist[v] = d;
                heap.push(HeapItem(d, v));
            }
        }
        while let Some(HeapItem(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &e in &self.adjacency[v] {
                let u = self.edges[e].other(v);
                let nd = d + costs[e];
                if nd < dist[u] && nd <= cutoff {
                    dist[u] = nd;
                    heap.push(HeapItem(nd, u));
                }
            }
        }
        dist
    }

    /// Breadth-first hop counts from `source`; `None` for unreachable vertices.
    pub fn hop_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut hops = vec![None; self.vertices.len()];
        let mut queue = VecDeque::from([source]);
        hops[source] = Some(0);
        while let Some(v) = queue.pop_front() {
            let d = hops[v].unwrap();
            for (_, u) in self.neighbors(v) {
                if hops[u].is_none() {
                    hops[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        hops
    }

    /// True when both endpoints of `e` lie outside the sphere-ball B_k,
    /// i.e. have sphere index ≥ k.
    pub fn edge_outside_ball(&self, e: usize, k: usize) -> bool {
        let edge = &self.edges[e];
        self.vertices[edge.source].sphere >= k && self.vertices[edge.target].sphere >= k
    }

    /// sup and inf of edge lengths, overall and over edges outside B_k.
    pub fn length_extremes(&self, exclusion_radii: &[usize]) -> Result<LengthExtremes> {
        let (ell_star_lower, ell_star_upper) = length_range(self.edges.iter());
        let max_sphere = self.max_sphere();
        let mut ell_ess_upper_seq = Vec::with_capacity(exclusion_radii.len());
        let mut ell_ess_lower_seq = Vec::with_capacity(exclusion_radii.len());
        for &k in exclusion_radii {
            if k > max_sphere {
                return Err(Error::Parameter(format!(
                    "exclusion radius {k} exceeds truncation depth {max_sphere}"
                )));
            }
            let outside = self.edges.iter().filter(|e| self.edge_outside_ball(e.id, k));
            let (lo, hi) = length_range(outside);
            if lo > hi {
                return Err(Error::EmptyRange(format!("no edge survives removal of B_{k}")));
            }
            ell_ess_upper_seq.push((k, hi));
            ell_ess_lower_seq.push((k, lo));
        }
        Ok(LengthExtremes { ell_star_upper, ell_star_lower, ell_ess_upper_seq, ell_ess_lower_seq })
    }

    /// Quantities entering the essential self-adjointness criteria, with
    /// truncation-based trend verdicts.
    pub fn selfadjointness_diagnostics(&self) -> SelfAdjointnessDiagnostics {
        let weights = self.vertex_weights();
        let depth = self.max_sphere();

        let mut m_by_sphere = vec![f64::INFINITY; depth + 1];
        for v in self.vertices.iter().filter(|v| !v.frontier) {
            m_by_sphere[v.sphere] = m_by_sphere[v.sphere].min(weights[v.id]);
        }
        let mut len_by_sphere = vec![f64::INFINITY; depth + 1];
        for e in &self.edges {
            let s = self.vertices[e.source].sphere;
            len_by_sphere[s] = len_by_sphere[s].min(e.length);
        }
        let inf_m = m_by_sphere.iter().copied().fold(f64::INFINITY, f64::min);
        let ell_star_lower = len_by_sphere.iter().copied().fold(f64::INFINITY, f64::min);

        let sphere_radii = |metric: Metric| -> Vec<f64> {
            let dist = self.path_distances(self.root, metric).expect("root exists");
            let mut radii = vec![f64::INFINITY; depth + 1];
            for v in &self.vertices {
                radii[v.sphere] = radii[v.sphere].min(dist[v.id]);
            }
            radii
        };
        let rho0_sphere_radii = sphere_radii(Metric::Rho0);
        let rhom_sphere_radii = sphere_radii(Metric::Rhom);

        let mut verdicts = Vec::new();
        if stays_positive(&m_by_sphere) {
            verdicts.push(SaVerdict::InfMPositive);
        }
        if stays_positive(&len_by_sphere) {
            verdicts.push(SaVerdict::EllStarPositive);
        }
        if radii_diverge(&rho0_sphere_radii) {
            verdicts.push(SaVerdict::Rho0Complete);
        }
        if radii_diverge(&rhom_sphere_radii) {
            verdicts.push(SaVerdict::RhomComplete);
        }

        SelfAdjointnessDiagnostics {
            inf_m,
            ell_star_lower,
            rho0_sphere_radii,
            rhom_sphere_radii,
            verdicts,
            label: HEURISTIC_LABEL.to_string(),
        }
    }
}

/// Label attached to every verdict inferred from a finite truncation.
pub const HEURISTIC_LABEL: &str = "heuristic: truncation evidence only";

/// Minimum number of sphere samples for a trend verdict.
const MIN_TREND_POINTS: usize = 4;

fn length_range<'a>(edges: impl Iterator<Item = &'a Edge>) -> (f64, f64) {
    edges.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
        (lo.min(e.length), hi.max(e.length))
    })
}

/// Per-sphere minima, finite entries only, as `(n + 1, value)` pairs.
fn finite_points(seq: &[f64]) -> (Vec<f64>, Vec<f64>) {
    seq.iter()
        .enumerate()
        .filter(|(_, y)| y.is_finite())
        .map(|(n, &y)| ((n + 1) as f64, y))
        .unzip()
}

/// Positive and, over the tail, not decaying like a power.
fn stays_positive(per_sphere_min: &[f64]) -> bool {
    let (xs, ys) = finite_points(per_sphere_min);
    if ys.is_empty() || ys.iter().any(|&y| y <= 0.0) {
        return false;
    }
    if xs.len() < MIN_TREND_POINTS {
        return true;
    }
    let tx = fit::tail(&xs, MIN_TREND_POINTS);
    let ty = fit::tail(&ys, MIN_TREND_POINTS);
    fit::loglog_slope(tx, ty).is_none_or(|s| s > -0.25)
}

/// Increments between consecutive sphere radii decay no faster than 1/n.
fn radii_diverge(radii: &[f64]) -> bool {
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].is_finite() && w[1].is_finite())
        .map(|(i, w)| ((i + 1) as f64, w[1] - w[0]))
        .unzip();
    if xs.len() < MIN_TREND_POINTS {
        return false;
    }
    let tx = fit::tail(&xs, MIN_TREND_POINTS);
    let ty = fit::tail(&ys, MIN_TREND_POINTS);
    match fit::loglog_slope(tx, ty) {
        Some(s) => s >= -1.1,
        None => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthExtremes {
    /// ℓ* = sup |e|.
    pub ell_star_upper: f64,
    /// ℓ_* = inf |e|.
    pub ell_star_lower: f64,
    /// `(k, sup |e|)` over edges outside B_k; nonincreasing in k.
    pub ell_ess_upper_seq: Vec<(usize, f64)>,
    /// `(k, inf |e|)` over edges outside B_k; nondecreasing in k.
    pub ell_ess_lower_seq: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SaVerdict {
    InfMPositive,
    EllStarPositive,
    Rho0Complete,
    RhomComplete,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfAdjointnessDiagnostics {
    pub inf_m: f64,
    pub ell_star_lower: f64,
    pub rho0_sphere_radii: Vec<f64>,
    pub rhom_sphere_radii: Vec<f64>,
    pub verdicts: Vec<SaVerdict>,
    pub label: String,
}

impl SelfAdjointnessDiagnostics {
    pub fn has(&self, v: SaVerdict) -> bool {
        self.verdicts.contains(&v)
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn vertex(id: usize, sphere: usize, ambient: usize, frontier: bool) -> Vertex {
        let condition = if frontier { Condition::Dirichlet } else { Condition::Kirchhoff };
        Vertex { id, sphere, ambient_degree: ambient, condition, frontier }
    }

    pub(crate) fn edge(id: usize, source: usize, target: usize, length: f64) -> Edge {
        Edge { id, source, target, length }
    }

    /// Path v0 - v1 - ... - vn with the given lengths; ends are Neumann loose ends.
    pub(crate) fn path(lengths: &[f64]) -> MetricGraph {
        let n = lengths.len();
        let vertices = (0..=n)
            .map(|i| {
                let end = i == 0 || i == n;
                Vertex {
                    id: i,
                    sphere: i,
                    ambient_degree: if end { 1 } else { 2 },
                    condition: if end { Condition::Neumann } else { Condition::Kirchhoff },
                    frontier: false,
                }
            })
            .collect();
        let edges = lengths.iter().enumerate().map(|(i, &l)| edge(i, i, i + 1, l)).collect();
        MetricGraph::new(vertices, edges, 0, true).unwrap()
    }

    fn star3() -> MetricGraph {
        let vertices = vec![
            vertex(0, 0, 3, false),
            vertex(1, 1, 3, true),
            vertex(2, 1, 3, true),
            vertex(3, 1, 3, true),
        ];
        let edges = (0..3).map(|i| edge(i, 0, i + 1, 1.0)).collect();
        MetricGraph::new(vertices, edges, 0, false).unwrap()
    }

    fn four_cycle() -> MetricGraph {
        let vertices = vec![
            vertex(0, 0, 2, false),
            vertex(1, 1, 2, false),
            vertex(2, 2, 2, false),
            vertex(3, 1, 2, false),
        ];
        let edges = vec![edge(0, 0, 1, 1.0), edge(1, 1, 2, 1.0), edge(2, 3, 2, 1.0), edge(3, 0, 3, 10.0)];
        MetricGraph::new(vertices, edges, 0, true).unwrap()
    }

    #[test]
    fn star_weight_is_sum_of_lengths() {
        let g = star3();
        assert_eq!(g.vertex_weight(0).unwrap(), 3.0);
        assert!(matches!(g.vertex_weight(9), Err(Error::UnknownVertex(9))));
    }

    #[test]
    fn path_distances_rho0_and_rhom() {
        let g = path(&[1.0, 1.0]);
        assert_eq!(g.path_distances(0, Metric::Rho0).unwrap(), vec![0.0, 1.0, 2.0]);
        assert_eq!(g.vertex_weights(), vec![1.0, 2.0, 1.0]);
        assert_eq!(g.path_distances(0, Metric::Rhom).unwrap(), vec![0.0, 3.0, 6.0]);
    }

    #[test]
    fn long_edge_is_bypassed() {
        let g = four_cycle();
        assert_eq!(g.path_distances(0, Metric::Rho0).unwrap()[3], 3.0);
        assert_eq!(g.path_distances(3, Metric::Rho0).unwrap()[0], 3.0);
    }

    #[test]
    fn degree_two_needs_override() {
        let g = four_cycle();
        let err = MetricGraph::new(g.vertices().to_vec(), g.edges().to_vec(), 0, false).unwrap_err();
        assert!(err.to_string().contains("degree 2"), "{err}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = star3();
        let mut edges = g.edges().to_vec();
        edges[1].length = 0.0;
        let err = MetricGraph::new(g.vertices().to_vec(), edges, 0, false).unwrap_err();
        assert!(err.to_string().contains("finite positive length"));

        let mut edges = g.edges().to_vec();
        edges[2].target = 2;
        let err = MetricGraph::new(g.vertices().to_vec(), edges, 0, false).unwrap_err();
        assert!(err.to_string().contains("edges 1 and 2"), "{err}");

        let mut edges = g.edges().to_vec();
        edges[0] = edge(0, 1, 0, 1.0);
        let err = MetricGraph::new(g.vertices().to_vec(), edges, 0, false).unwrap_err();
        assert!(err.to_string().contains("oriented"));

        let mut vertices = g.vertices().to_vec();
        vertices[1].condition = Condition::Neumann;
        assert!(MetricGraph::new(vertices, g.edges().to_vec(), 0, false).is_err());

        let mut vertices = g.vertices().to_vec();
        vertices[0].condition = Condition::Dirichlet;
        assert!(MetricGraph::new(vertices, g.edges().to_vec(), 0, false).is_err());

        let mut vertices = g.vertices().to_vec();
        vertices[1].frontier = false;
        vertices[1].condition = Condition::Kirchhoff;
        assert!(MetricGraph::new(vertices, g.edges().to_vec(), 0, false).is_err());
    }

    #[test]
    fn rejects_disconnected() {
        let vertices = vec![
            vertex(0, 0, 1, false),
            vertex(1, 1, 1, false),
            vertex(2, 1, 1, false),
            vertex(3, 2, 1, false),
        ];
        let vertices = vertices
            .into_iter()
            .map(|mut v| {
                v.condition = Condition::Neumann;
                v
            })
            .collect();
        let edges = vec![edge(0, 0, 1, 1.0), edge(1, 2, 3, 1.0)];
        let err = MetricGraph::new(vertices, edges, 0, false).unwrap_err();
        assert!(err.to_string().contains("disconnected"));
    }

    #[test]
    fn length_extremes_on_path() {
        let g = path(&[3.0, 1.0, 2.0, 0.5]);
        let ex = g.length_extremes(&[0, 1, 2, 3]).unwrap();
        assert_eq!(ex.ell_star_upper, 3.0);
        assert_eq!(ex.ell_star_lower, 0.5);
        assert_eq!(ex.ell_ess_upper_seq, vec![(0, 3.0), (1, 2.0), (2, 2.0), (3, 0.5)]);
        assert_eq!(ex.ell_ess_lower_seq, vec![(0, 0.5), (1, 0.5), (2, 0.5), (3, 0.5)]);
        assert!(matches!(g.length_extremes(&[4]), Err(Error::EmptyRange(_))));
        assert!(matches!(g.length_extremes(&[5]), Err(Error::Parameter(_))));
    }

    #[test]
    fn scaling_doubles_weights() {
        let g = four_cycle();
        let h = g.scaled(2.0).unwrap();
        for v in 0..4 {
            assert_eq!(h.vertex_weight(v).unwrap(), 2.0 * g.vertex_weight(v).unwrap());
        }
    }

    #[test]
    fn path_diagnostics() {
        let g = crate::generators::lattice(1, 12, 1.0).unwrap();
        let d = g.selfadjointness_diagnostics();
        assert_eq!(d.inf_m, 2.0);
        assert!(d.has(SaVerdict::InfMPositive));
        assert!(d.has(SaVerdict::EllStarPositive));
        assert!(d.has(SaVerdict::Rho0Complete));
        assert!(d.has(SaVerdict::RhomComplete));
        assert!(d.rho0_sphere_radii.windows(2).all(|w| w[0] <= w[1]));

        let lengths: Vec<f64> = (1..=20).map(|n| 1.0 / (n as f64).powi(2)).collect();
        let d = path(&lengths).selfadjointness_diagnostics();
        assert!(!d.has(SaVerdict::EllStarPositive));
        assert!(!d.has(SaVerdict::Rho0Complete));
    }
}
