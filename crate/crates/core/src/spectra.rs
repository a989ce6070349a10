//! λ₀ of truncations: finite elements for the Kirchhoff Laplacian, the
//! generalized eigenproblem for the difference Laplacian, the equilateral
//! transfer between them, and the piecewise-linear identities linking both.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::FamilySpec;
use crate::graph::MetricGraph;
use crate::linalg::{smallest_eigenvalue, CsrMatrix, EigenOptions, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Quantum,
    Discrete,
}

/// Difference Laplacian L and diagonal mass D over non-Dirichlet vertices.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    /// Vertex id of each matrix index.
    pub vertex_of: Vec<usize>,
    /// Matrix index of each vertex, `None` for Dirichlet vertices.
    pub index_of: Vec<Option<usize>>,
}

fn free_vertices(g: &MetricGraph) -> Result<(Vec<usize>, Vec<Option<usize>>)> {
    let mut vertex_of = Vec::new();
    let mut index_of = vec![None; g.num_vertices()];
    for v in 0..g.num_vertices() {
        if !g.is_dirichlet(v) {
            index_of[v] = Some(vertex_of.len());
            vertex_of.push(v);
        }
    }
    Ok((vertex_of, index_of))
}

pub fn assemble_discrete(g: &MetricGraph) -> Result<DiscreteSystem> {
    let (vertex_of, index_of) = free_vertices(g)?;
    if vertex_of.is_empty() {
        return Err(Error::EmptyRange("every vertex carries a Dirichlet condition".into()));
    }
    let mut trip = Vec::with_capacity(4 * g.num_edges());
    for e in g.edges() {
        let b = 1.0 / e.length;
        let (i, j) = (index_of[e.source], index_of[e.target]);
        if let Some(i) = i {
            trip.push((i, i, b));
        }
        if let Some(j) = j {
            trip.push((j, j, b));
        }
        if let (Some(i), Some(j)) = (i, j) {
            trip.push((i, j, -b));
            trip.push((j, i, -b));
        }
    }
    let n = vertex_of.len();
    let weights = g.vertex_weights();
    let mass: Vec<f64> = vertex_of.iter().map(|&v| weights[v]).collect();
    Ok(DiscreteSystem {
        stiffness: CsrMatrix::from_triplets(n, &trip)?,
        mass: CsrMatrix::from_diagonal(&mass),
        vertex_of,
        index_of,
    })
}

/// Continuous piecewise-linear elements with consistent mass.
#[derive(Debug, Clone)]
pub struct FemSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub h_target: f64,
    /// Number of segments per edge.
    pub segments: Vec<usize>,
    /// Matrix index of each graph vertex, `None` when Dirichlet.
    pub vertex_index: Vec<Option<usize>>,
    /// Index of the first interior node of each edge (nodes run source → target).
    pub edge_offset: Vec<usize>,
}

impl FemSystem {
    pub fn size(&self) -> usize {
        self.stiffness.n()
    }

    /// Nodal values of the function that is linear on each edge with the
    /// given vertex values.
    pub fn interpolate(&self, g: &MetricGraph, f: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.size()];
        for (v, idx) in self.vertex_index.iter().enumerate() {
            if let Some(i) = idx {
                x[*i] = f[v];
            }
        }
        for e in g.edges() {
            let k = self.segments[e.id];
            for s in 1..k {
                let t = s as f64 / k as f64;
                x[self.edge_offset[e.id] + s - 1] = (1.0 - t) * f[e.source] + t * f[e.target];
            }
        }
        x
    }
}

pub fn assemble_quantum_fem(g: &MetricGraph, h_target: f64) -> Result<FemSystem> {
    if !(h_target.is_finite() && h_target > 0.0) {
        return Err(Error::Parameter(format!("mesh size must be positive, got {h_target}")));
    }
    let (vertex_of, vertex_index) = free_vertices(g)?;
    let segments: Vec<usize> =
        g.edges().iter().map(|e| ((e.length / h_target).ceil() as usize).max(1)).collect();
    let mut edge_offset = Vec::with_capacity(g.num_edges());
    let mut next = vertex_of.len();
    for &k in &segments {
        edge_offset.push(next);
        next += k - 1;
    }
    let n = next;
    if n == 0 {
        return Err(Error::EmptyRange("mesh has no free node".into()));
    }

    let per_edge: Vec<(Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>)> = g
        .edges()
        .par_iter()
        .map(|e| {
            let k = segments[e.id];
            let h = e.length / k as f64;
            let node = |s: usize| -> Option<usize> {
                if s == 0 {
                    vertex_index[e.source]
                } else if s == k {
                    vertex_index[e.target]
                } else {
                    Some(edge_offset[e.id] + s - 1)
                }
            };
            let (mut kt, mut mt) = (Vec::with_capacity(4 * k), Vec::with_capacity(4 * k));
            for s in 0..k {
                let (a, b) = (node(s), node(s + 1));
                for (p, q, stiff, mass) in [
                    (a, a, 1.0 / h, h / 3.0),
                    (b, b, 1.0 / h, h / 3.0),
                    (a, b, -1.0 / h, h / 6.0),
                    (b, a, -1.0 / h, h / 6.0),
                ] {
                    if let (Some(p), Some(q)) = (p, q) {
                        kt.push((p, q, stiff));
                        mt.push((p, q, mass));
                    }
                }
            }
            (kt, mt)
        })
        .collect();
    let (mut kt, mut mt) = (Vec::new(), Vec::new());
    for (k, m) in per_edge {
        kt.extend(k);
        mt.extend(m);
    }
    Ok(FemSystem {
        stiffness: CsrMatrix::from_triplets(n, &kt)?,
        mass: CsrMatrix::from_triplets(n, &mt)?,
        h_target,
        segments,
        vertex_index,
        edge_offset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub mode: Mode,
    pub lambda0: f64,
    pub residual: f64,
    pub size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    pub method: Method,
    pub shift: f64,
    /// `(depth, λ₀)` when computed as a sequence of truncations.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub monotone_history: Vec<(usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
}

/// Default mesh size: a twentieth of the shortest edge.
pub fn default_mesh(g: &MetricGraph) -> f64 {
    g.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min) / 20.0
}

pub fn lambda0_discrete(g: &MetricGraph, opts: &EigenOptions) -> Result<SpectralResult> {
    let sys = assemble_discrete(g)?;
    let r = smallest_eigenvalue(&sys.stiffness, &sys.mass, opts)?;
    Ok(SpectralResult {
        mode: Mode::Discrete,
        lambda0: r.lambda,
        residual: r.residual,
        size: r.size,
        h: None,
        depth: Some(g.max_sphere()),
        method: r.method,
        shift: r.shift,
        monotone_history: Vec::new(),
        monotone: None,
    })
}

pub fn lambda0_quantum(g: &MetricGraph, h_target: f64, opts: &EigenOptions) -> Result<SpectralResult> {
    let sys = assemble_quantum_fem(g, h_target)?;
    let r = smallest_eigenvalue(&sys.stiffness, &sys.mass, opts)?;
    Ok(SpectralResult {
        mode: Mode::Quantum,
        lambda0: r.lambda,
        residual: r.residual,
        size: r.size,
        h: Some(h_target),
        depth: Some(g.max_sphere()),
        method: r.method,
        shift: r.shift,
        monotone_history: Vec::new(),
        monotone: None,
    })
}

pub fn lambda0(g: &MetricGraph, mode: Mode, h_target: Option<f64>, opts: &EigenOptions) -> Result<SpectralResult> {
    match mode {
        Mode::Discrete => lambda0_discrete(g, opts),
        Mode::Quantum => lambda0_quantum(g, h_target.unwrap_or_else(|| default_mesh(g)), opts),
    }
}

/// λ₀ over increasing truncation depths with one mesh size for all depths,
/// so that the discrete spaces are nested. The default mesh resolves the
/// shortest edge of the deepest truncation.
pub fn lambda0_sequence(
    spec: &FamilySpec,
    depths: &[usize],
    mode: Mode,
    h_target: Option<f64>,
    opts: &EigenOptions,
) -> Result<SpectralResult> {
    if depths.is_empty() || depths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("depths must be nonempty and increasing".into()));
    }
    let deepest = spec.with_depth(*depths.last().unwrap()).generate()?;
    let h = h_target.unwrap_or_else(|| default_mesh(&deepest));
    drop(deepest);
    let results: Vec<SpectralResult> = depths
        .par_iter()
        .map(|&d| lambda0(&spec.with_depth(d).generate()?, mode, Some(h), opts))
        .collect::<Result<_>>()?;
    let history: Vec<(usize, f64)> = depths.iter().copied().zip(results.iter().map(|r| r.lambda0)).collect();
    let slack = 10.0 * opts.tol;
    let monotone = history.windows(2).all(|w| w[1].1 <= w[0].1 + slack * w[0].1.abs().max(1.0));
    let mut last = results.into_iter().last().unwrap();
    last.monotone_history = history;
    last.monotone = Some(monotone);
    Ok(last)
}

/// λ ↦ 1 − cos √λ for λ ∈ [0, π²].
pub fn equilateral_transfer(lambda_quantum: f64) -> Result<f64> {
    let pi2 = std::f64::consts::PI.powi(2);
    if !(0.0..=pi2).contains(&lambda_quantum) {
        return Err(Error::Parameter(format!("transfer needs λ in [0, π²], got {lambda_quantum}")));
    }
    Ok(1.0 - lambda_quantum.sqrt().cos())
}

/// λ ↦ arccos(1 − λ)² for λ ∈ [0, 2].
pub fn equilateral_transfer_inverse(lambda_discrete: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&lambda_discrete) {
        return Err(Error::Parameter(format!("inverse transfer needs λ in [0, 2], got {lambda_discrete}")));
    }
    Ok((1.0 - lambda_discrete).acos().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlNorms {
    pub l2_norm_sq: f64,
    pub energy: f64,
    pub l2m_norm_sq: f64,
}

fn check_vertex_function(g: &MetricGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.num_vertices() {
        return Err(Error::Parameter(format!("{} values for {} vertices", f.len(), g.num_vertices())));
    }
    if let Some(v) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::Parameter(format!("value at vertex {v} is not finite")));
    }
    Ok(())
}

/// Norms and energy of the function linear on each edge with vertex values `f`.
pub fn pl_utilities(g: &MetricGraph, f: &[f64]) -> Result<PlNorms> {
    check_vertex_function(g, f)?;
    if let Some(v) = (0..g.num_vertices()).find(|&v| g.is_dirichlet(v) && f[v] != 0.0) {
        return Err(Error::Parameter(format!("f must vanish at Dirichlet vertex {v}")));
    }
    let mut out = PlNorms { l2_norm_sq: 0.0, energy: 0.0, l2m_norm_sq: 0.0 };
    for e in g.edges() {
        let (a, b) = (f[e.source], f[e.target]);
        out.l2_norm_sq += e.length * (a * a + a * b + b * b) / 3.0;
        out.energy += (a - b) * (a - b) / e.length;
    }
    let w = g.vertex_weights();
    out.l2m_norm_sq = f.iter().zip(&w).map(|(x, m)| m * x * x).sum();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoareaCheck {
    /// ∫|f′| edge by edge.
    pub lhs: f64,
    /// ∫ #{f = t} dt by band summation.
    pub rhs: f64,
    /// ∫|(f²)′| edge by edge.
    pub lhs_sq: f64,
    /// ∫ #{f² = t} dt by band summation.
    pub rhs_sq: f64,
}

impl CoareaCheck {
    pub fn max_relative_gap(&self) -> f64 {
        let rel = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
        rel(self.lhs, self.rhs).max(rel(self.lhs_sq, self.rhs_sq))
    }
}

fn sorted_levels(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Both sides of the co-area formula for f and f² with f linear on edges.
pub fn coarea_continuous_check(g: &MetricGraph, f: &[f64]) -> Result<CoareaCheck> {
    check_vertex_function(g, f)?;
    let ends: Vec<(f64, f64)> = g.edges().iter().map(|e| (f[e.source], f[e.target])).collect();

    let lhs = ends.iter().map(|(a, b)| (a - b).abs()).sum();
    let levels = sorted_levels(f.to_vec());
    let mut rhs = 0.0;
    for w in levels.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let count = ends.iter().filter(|(a, b)| a.min(*b) <= lo && a.max(*b) >= hi).count();
        rhs += count as f64 * (hi - lo);
    }

    let lhs_sq = ends
        .iter()
        .map(|&(a, b)| if a * b < 0.0 { a * a + b * b } else { (a * a - b * b).abs() })
        .sum();
    let mut sq: Vec<f64> = f.iter().map(|x| x * x).collect();
    sq.push(0.0);
    let levels = sorted_levels(sq);
    let mut rhs_sq = 0.0;
    for w in levels.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mut count = 0;
        for &(a, b) in &ends {
            let (a2, b2) = (a * a, b * b);
            if a * b < 0.0 {
                // f² runs a² → 0 → b² along the edge
                count += (a2 >= hi) as usize + (b2 >= hi) as usize;
            } else if a2.min(b2) <= lo && a2.max(b2) >= hi {
                count += 1;
            }
        }
        rhs_sq += count as f64 * (hi - lo);
    }
    Ok(CoareaCheck { lhs, rhs, lhs_sq, rhs_sq })
}
