//! Weighted graphs (V, m, b) with an edge weight d, intrinsic weights, the
//! weighted isoperimetric constant, the discrete co-area formulas and the
//! Cheeger bound λ₀ ≥ α²/2.
//!
//! Finite graphs stand in for infinite ones through a designated Dirichlet
//! vertex set: those vertices are excluded from candidate sets X and from
//! the rows of the eigenproblem. Without it X = V would force α = 0.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, Best, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::isoperimetry::{cut_ratio, min_cut_ratio, IsoKind, IsoReport, VertexWitness, Witness};
use crate::linalg::{smallest_eigenvalue, CsrMatrix, EigenOptions, EigenResult};

pub const WGRAPH_FORMAT: &str = "wgraph/1";

/// Relative slack accepted by [`is_intrinsic`].
pub const INTRINSIC_TOL: f64 = 1e-12;

/// Above this many candidate vertices `alpha_weighted` switches from
/// all-subsets search to connected-set enumeration.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WVertex {
    pub id: usize,
    pub m: f64,
    #[serde(default)]
    pub dirichlet: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WEdge {
    pub source: usize,
    pub target: usize,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertices: Vec<WVertex>,
    edges: Vec<WEdge>,
    adjacency: Vec<Vec<usize>>,
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

impl WeightedGraph {
    pub fn new(vertices: Vec<WVertex>, edges: Vec<WEdge>) -> Result<Self> {
        let n = vertices.len();
        for (i, v) in vertices.iter().enumerate() {
            if v.id != i {
                return Err(Error::Validation(format!("vertex at position {i} has id {}", v.id)));
            }
            if !positive(v.m) {
                return Err(Error::Validation(format!("vertex {i} needs m > 0, got {}", v.m)));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.source >= n || e.target >= n {
                return Err(Error::Validation(format!("edge {i} references a missing vertex")));
            }
            if e.source == e.target {
                return Err(Error::Validation(format!("edge {i} is a loop")));
            }
            if !positive(e.b) || e.d.is_some_and(|d| !positive(d)) {
                return Err(Error::Validation(format!("edge {i} needs positive finite b and d")));
            }
            if !seen.insert((e.source.min(e.target), e.source.max(e.target))) {
                return Err(Error::Validation(format!("edge {i} duplicates an earlier edge")));
            }
            adjacency[e.source].push(i);
            adjacency[e.target].push(i);
        }
        Ok(WeightedGraph { vertices, edges, adjacency })
    }

    /// m = Σ|e|, b = 1/|e|, d = |e|, Dirichlet set = Dirichlet and frontier vertices.
    pub fn from_metric(g: &MetricGraph) -> Self {
        let w = g.vertex_weights();
        let vertices = (0..g.num_vertices())
            .map(|v| WVertex { id: v, m: w[v], dirichlet: g.is_dirichlet(v) })
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|e| WEdge { source: e.source, target: e.target, b: 1.0 / e.length, d: Some(e.length) })
            .collect();
        WeightedGraph::new(vertices, edges).expect("metric graphs induce valid weights")
    }

    pub fn vertices(&self) -> &[WVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[WEdge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    fn d_values(&self) -> Result<Vec<f64>> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| e.d.ok_or_else(|| Error::Parameter(format!("edge {i} has no weight d"))))
            .collect()
    }

    /// Generalized eigenproblem L_b f = λ m f on the non-Dirichlet vertices.
    pub fn operator(&self) -> Result<(CsrMatrix, CsrMatrix, Vec<usize>)> {
        let free: Vec<usize> = (0..self.num_vertices()).filter(|&v| !self.vertices[v].dirichlet).collect();
        if free.is_empty() {
            return Err(Error::EmptyRange("every vertex is Dirichlet".into()));
        }
        let mut index = vec![None; self.num_vertices()];
        for (i, &v) in free.iter().enumerate() {
            index[v] = Some(i);
        }
        let mut trip = Vec::new();
        for e in &self.edges {
            let (i, j) = (index[e.source], index[e.target]);
            for k in [i, j].into_iter().flatten() {
                trip.push((k, k, e.b));
            }
            if let (Some(i), Some(j)) = (i, j) {
                trip.push((i, j, -e.b));
                trip.push((j, i, -e.b));
            }
        }
        let mass: Vec<f64> = free.iter().map(|&v| self.vertices[v].m).collect();
        Ok((CsrMatrix::from_triplets(free.len(), &trip)?, CsrMatrix::from_diagonal(&mass), free))
    }

    pub fn lambda0(&self, opts: &EigenOptions) -> Result<EigenResult> {
        let (a, b, _) = self.operator()?;
        smallest_eigenvalue(&a, &b, opts)
    }

    pub fn to_json(&self) -> String {
        let file = WgraphFile { format: WGRAPH_FORMAT.to_string(), vertices: self.vertices.clone(), edges: self.edges.clone() };
        serde_json::to_string_pretty(&file).expect("finite weights serialize") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: WgraphFile = serde_json::from_str(text)?;
        if file.format != WGRAPH_FORMAT {
            return Err(Error::Format(format!("expected format {WGRAPH_FORMAT}, found {}", file.format)));
        }
        WeightedGraph::new(file.vertices, file.edges)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WgraphFile {
    format: String,
    vertices: Vec<WVertex>,
    edges: Vec<WEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicCheck {
    /// m(v) − Σ_{e ∋ v} d(e)² b(e)
    pub slack: Vec<f64>,
    pub intrinsic: bool,
    pub violations: Vec<usize>,
}

pub fn is_intrinsic(w: &WeightedGraph) -> Result<IntrinsicCheck> {
    let d = w.d_values()?;
    let slack: Vec<f64> = (0..w.num_vertices())
        .map(|v| w.vertices[v].m - w.adjacency[v].iter().map(|&e| d[e] * d[e] * w.edges[e].b).sum::<f64>())
        .collect();
    let violations: Vec<usize> =
        (0..slack.len()).filter(|&v| slack[v] < -INTRINSIC_TOL * w.vertices[v].m).collect();
    Ok(IntrinsicCheck { intrinsic: violations.is_empty(), slack, violations })
}

fn cut_system(w: &WeightedGraph, d: &[f64]) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
    let nbrs = (0..w.num_vertices())
        .map(|v| {
            w.adjacency[v]
                .iter()
                .map(|&e| {
                    let edge = &w.edges[e];
                    let u = if edge.source == v { edge.target } else { edge.source };
                    (u, d[e] * edge.b)
                })
                .collect()
        })
        .collect();
    (nbrs, w.vertices.iter().map(|v| v.m).collect())
}

fn is_connected(nbrs: &[Vec<(usize, f64)>], ids: &[usize]) -> bool {
    let set: BTreeSet<usize> = ids.iter().copied().collect();
    let mut seen = BTreeSet::from([ids[0]]);
    let mut stack = vec![ids[0]];
    while let Some(v) = stack.pop() {
        for &(u, _) in &nbrs[v] {
            if set.contains(&u) && seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen.len() == set.len()
}

/// inf over candidate X with |X| ≤ cap of (d·b)(E_b(X))/m(X). Candidates
/// avoid the Dirichlet set and `removal`. Up to 20 candidates every subset
/// is scored; the witness is the best connected one.
pub fn alpha_weighted(w: &WeightedGraph, cap: usize, removal: Option<&[usize]>) -> Result<IsoReport> {
    alpha_weighted_budget(w, cap, removal, DEFAULT_BUDGET)
}

pub fn alpha_weighted_budget(
    w: &WeightedGraph,
    cap: usize,
    removal: Option<&[usize]>,
    budget: u64,
) -> Result<IsoReport> {
    if cap == 0 {
        return Err(Error::Parameter("enumeration cap must be at least 1".into()));
    }
    let d = w.d_values()?;
    let (nbrs, weight) = cut_system(w, &d);
    let mut allowed: Vec<bool> = w.vertices.iter().map(|v| !v.dirichlet).collect();
    for &v in removal.unwrap_or(&[]) {
        if v >= allowed.len() {
            return Err(Error::UnknownVertex(v));
        }
        allowed[v] = false;
    }
    let candidates: Vec<usize> = (0..allowed.len()).filter(|&v| allowed[v]).collect();
    if candidates.is_empty() {
        return Err(Error::EmptyRange("no candidate vertex outside the Dirichlet and removal sets".into()));
    }

    let (value, witness, examined) = if candidates.len() <= BRUTE_FORCE_LIMIT {
        let k = candidates.len();
        let mut best_any = f64::INFINITY;
        let mut best_conn: Option<Best> = None;
        let mut examined = 0u64;
        let mut ids = Vec::with_capacity(k);
        for mask in 1u32..(1u32 << k) {
            if mask.count_ones() as usize > cap {
                continue;
            }
            examined += 1;
            ids.clear();
            ids.extend((0..k).filter(|&i| mask & (1 << i) != 0).map(|i| candidates[i]));
            let (cut, meas) = cut_ratio(&nbrs, &weight, &ids);
            let r = cut / meas;
            best_any = best_any.min(r);
            let better = match &best_conn {
                None => true,
                Some(b) => enumerate::compare(r, &ids, b.ratio, &b.ids).is_lt(),
            };
            if better && is_connected(&nbrs, &ids) {
                best_conn = Some(Best { ratio: r, ids: ids.clone() });
            }
        }
        let b = best_conn.expect("singletons are connected");
        let (boundary, measure) = cut_ratio(&nbrs, &weight, &b.ids);
        (best_any, VertexWitness { vertex_ids: b.ids, boundary, measure, ratio: b.ratio }, examined)
    } else {
        let (wit, examined) = min_cut_ratio(&nbrs, &weight, &allowed, cap, budget)?;
        let wit = wit.expect("nonempty candidate set");
        (wit.ratio, wit, examined)
    };
    Ok(IsoReport {
        kind: IsoKind::AlphaWeighted,
        value_upper: value,
        witness: Witness::Vertices(witness),
        essential_seq: Vec::new(),
        enumeration_cap: cap,
        exhaustive_within_cap: true,
        examined,
        ball_ratios: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoareaDiscrete {
    pub lhs1: f64,
    pub rhs1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
}

impl CoareaDiscrete {
    pub fn max_relative_gap(&self) -> f64 {
        let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
        rel(self.lhs1, self.rhs1).max(rel(self.lhs2, self.rhs2))
    }
}

/// Σ f m = ∫ m(Ω_t) dt and Σ d|f(u) − f(v)| = ∫ d(E_b(Ω_t)) dt with
/// Ω_t = {f > t}, the integrals summed band by band over the sorted values.
pub fn coarea_discrete_check(w: &WeightedGraph, f: &[f64]) -> Result<CoareaDiscrete> {
    if f.len() != w.num_vertices() {
        return Err(Error::Parameter(format!("{} values for {} vertices", f.len(), w.num_vertices())));
    }
    if let Some(v) = f.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Parameter(format!("f must be finite and nonnegative, fails at vertex {v}")));
    }
    let d = w.d_values()?;
    let lhs1 = f.iter().zip(&w.vertices).map(|(x, v)| x * v.m).sum();
    let lhs2 = w.edges.iter().zip(&d).map(|(e, d)| d * (f[e.source] - f[e.target]).abs()).sum();

    let mut levels: Vec<f64> = f.iter().copied().chain([0.0]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let (mut rhs1, mut rhs2) = (0.0, 0.0);
    for band in levels.windows(2) {
        let (lo, hi) = (band[0], band[1]);
        let width = hi - lo;
        let m_omega: f64 = f.iter().zip(&w.vertices).filter(|(x, _)| **x >= hi).map(|(_, v)| v.m).sum();
        let d_cut: f64 = w
            .edges
            .iter()
            .zip(&d)
            .filter(|(e, _)| {
                let (a, b) = (f[e.source], f[e.target]);
                a.min(b) <= lo && a.max(b) >= hi
            })
            .map(|(_, d)| d)
            .sum();
        rhs1 += m_omega * width;
        rhs2 += d_cut * width;
    }
    Ok(CoareaDiscrete { lhs1, rhs1, lhs2, rhs2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerDiscrete {
    pub alpha: f64,
    /// α²/2
    pub bound: f64,
    pub witness: Vec<usize>,
    /// True when every candidate set was scored, so α is the exact infimum
    /// and the bound is certified.
    pub exact: bool,
}

/// λ₀ ≥ α²/2 for intrinsic d. With `removal` the result is the essential
/// variant for that removed set.
pub fn cheeger_lower_discrete(w: &WeightedGraph, cap: usize, removal: Option<&[usize]>) -> Result<CheegerDiscrete> {
    let check = is_intrinsic(w)?;
    if !check.intrinsic {
        return Err(Error::NotIntrinsic(check.violations));
    }
    let r = alpha_weighted(w, cap, removal)?;
    let removed: BTreeSet<usize> = removal.unwrap_or(&[]).iter().copied().collect();
    let candidates = w.vertices.iter().filter(|v| !v.dirichlet && !removed.contains(&v.id)).count();
    let witness = r.vertex_witness().map(|w| w.vertex_ids.clone()).unwrap_or_default();
    Ok(CheegerDiscrete {
        alpha: r.value_upper,
        bound: r.value_upper * r.value_upper / 2.0,
        witness,
        exact: cap >= candidates,
    })
}

/// Random connected graph on `n ≥ 2` vertices with intrinsic d: a random
/// spanning tree plus extra edges, m(v) = (1 + t)·Σ d²b with t ∈ [0, 1)
/// (t = 0 on about a fifth of the vertices), and a nonempty Dirichlet set
/// leaving at least one free vertex.
pub fn random_intrinsic(rng: &mut impl Rng, n: usize) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 vertices, got {n}")));
    }
    let mut pairs = BTreeSet::new();
    for v in 1..n {
        pairs.insert((rng.random_range(0..v), v));
    }
    let p_extra = rng.random_range(0.0..0.5);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p_extra {
                pairs.insert((u, v));
            }
        }
    }
    let edges: Vec<WEdge> = pairs
        .into_iter()
        .map(|(source, target)| WEdge {
            source,
            target,
            b: rng.random_range(0.1..2.0),
            d: Some(rng.random_range(0.1..2.0)),
        })
        .collect();
    let mut load = vec![0.0; n];
    for e in &edges {
        let x = e.d.unwrap().powi(2) * e.b;
        load[e.source] += x;
        load[e.target] += x;
    }
    let n_dirichlet = rng.random_range(1..=(n / 3).max(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let dirichlet: BTreeSet<usize> = order[..n_dirichlet].iter().copied().collect();
    let vertices = (0..n)
        .map(|v| {
            let t = if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() };
            WVertex { id: v, m: load[v] * (1.0 + t), dirichlet: dirichlet.contains(&v) }
        })
        .collect();
    WeightedGraph::new(vertices, edges)
}
