//! Isoperimetric constants α, α_d, α_comb by exhaustive enumeration of
//! connected subgraphs and vertex sets, their essential sequences over
//! sphere-ball removals, and the inequalities linking them.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bounds::Verdict;
use crate::curvature::CurvatureProfile;
use crate::enumerate::{self, Scorer, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{MetricGraph, REL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoKind {
    AlphaMetric,
    AlphaD,
    AlphaComb,
    AlphaWeighted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubgraphWitness {
    pub edge_ids: Vec<usize>,
    pub vertex_ids: Vec<usize>,
    pub boundary_vertex_ids: Vec<usize>,
    pub deg_boundary: usize,
    pub volume: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexWitness {
    pub vertex_ids: Vec<usize>,
    /// Weighted size of E_b(X) (an edge count for α_d and α_comb).
    pub boundary: f64,
    /// m(X), deg(X), or the vertex-weight sum.
    pub measure: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Subgraph(SubgraphWitness),
    Vertices(VertexWitness),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoReport {
    pub kind: IsoKind,
    /// Minimum ratio found: an upper bound for the infimum.
    pub value_upper: f64,
    pub witness: Witness,
    /// `(k, value_upper over the complement of B_k)`, nondecreasing in k.
    pub essential_seq: Vec<(usize, f64)>,
    pub enumeration_cap: usize,
    pub exhaustive_within_cap: bool,
    pub examined: u64,
    /// `(n, ratio of the sphere ball of depth n)` for the metric constant.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ball_ratios: Vec<(usize, f64)>,
}

impl IsoReport {
    pub fn subgraph_witness(&self) -> Option<&SubgraphWitness> {
        match &self.witness {
            Witness::Subgraph(w) => Some(w),
            Witness::Vertices(_) => None,
        }
    }

    pub fn vertex_witness(&self) -> Option<&VertexWitness> {
        match &self.witness {
            Witness::Vertices(w) => Some(w),
            Witness::Subgraph(_) => None,
        }
    }
}

/// Whether a vertex with `deg_sub` subgraph edges lies on ∂_G of the subgraph.
fn on_boundary(g: &MetricGraph, v: usize, deg_sub: usize) -> bool {
    let vx = &g.vertices()[v];
    deg_sub > 0 && !g.is_neumann(v) && (g.is_dirichlet(v) || deg_sub < vx.ambient_degree)
}

/// Connected components of an edge set, as sorted edge-id lists.
fn edge_components(g: &MetricGraph, edge_ids: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let mut seen = BTreeSet::new();
    let mut comps = Vec::new();
    for &start in edge_ids {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start);
        let mut stack = vec![start];
        while let Some(e) = stack.pop() {
            let edge = &g.edges()[e];
            for v in [edge.source, edge.target] {
                for &f in g.incident(v) {
                    if edge_ids.contains(&f) && seen.insert(f) {
                        comp.push(f);
                        stack.push(f);
                    }
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Boundary ∂_G G̃ and its degree for the connected subgraph spanned by `edge_ids`.
pub fn boundary_degree(g: &MetricGraph, edge_ids: &[usize]) -> Result<SubgraphWitness> {
    if edge_ids.is_empty() {
        return Err(Error::EmptyRange("empty edge set".into()));
    }
    for &e in edge_ids {
        g.edge(e)?;
    }
    let set: BTreeSet<usize> = edge_ids.iter().copied().collect();
    let comps = edge_components(g, &set);
    if comps.len() > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let mut deg_sub = std::collections::BTreeMap::new();
    let mut volume = 0.0;
    for &e in &set {
        let edge = &g.edges()[e];
        volume += edge.length;
        *deg_sub.entry(edge.source).or_insert(0usize) += 1;
        *deg_sub.entry(edge.target).or_insert(0usize) += 1;
    }
    let mut boundary = Vec::new();
    let mut deg_boundary = 0;
    for (&v, &d) in &deg_sub {
        if on_boundary(g, v, d) {
            boundary.push(v);
            deg_boundary += d;
        }
    }
    Ok(SubgraphWitness {
        edge_ids: set.into_iter().collect(),
        vertex_ids: deg_sub.keys().copied().collect(),
        boundary_vertex_ids: boundary,
        deg_boundary,
        volume,
        ratio: deg_boundary as f64 / volume,
    })
}

struct EdgeScorer<'a> {
    g: &'a MetricGraph,
    deg_sub: Vec<usize>,
    deg_boundary: i64,
    volume: f64,
}

impl EdgeScorer<'_> {
    fn contrib(&self, v: usize, d: usize) -> i64 {
        if on_boundary(self.g, v, d) {
            d as i64
        } else {
            0
        }
    }

    fn bump(&mut self, v: usize, up: bool) {
        let d = self.deg_sub[v];
        let nd = if up { d + 1 } else { d - 1 };
        self.deg_boundary += self.contrib(v, nd) - self.contrib(v, d);
        self.deg_sub[v] = nd;
    }
}

impl Scorer for EdgeScorer<'_> {
    fn add(&mut self, e: usize) {
        let edge = &self.g.edges()[e];
        self.volume += edge.length;
        self.bump(edge.source, true);
        self.bump(edge.target, true);
    }

    fn remove(&mut self, e: usize) {
        let edge = &self.g.edges()[e];
        self.volume -= edge.length;
        self.bump(edge.source, false);
        self.bump(edge.target, false);
    }

    fn ratio(&self) -> f64 {
        self.deg_boundary as f64 / self.volume
    }
}

/// Line-graph adjacency: edges sharing an endpoint.
fn line_graph(g: &MetricGraph) -> Vec<Vec<usize>> {
    g.edges()
        .iter()
        .map(|e| {
            let mut nb: Vec<usize> = g
                .incident(e.source)
                .iter()
                .chain(g.incident(e.target))
                .copied()
                .filter(|&f| f != e.id)
                .collect();
            nb.sort_unstable();
            nb
        })
        .collect()
}

/// Vertex scorer for ratios Σ_{e ∈ E_b(X)} c(e) / Σ_{v ∈ X} w(v).
pub(crate) struct CutScorer<'a> {
    nbrs: &'a [Vec<(usize, f64)>],
    weight: &'a [f64],
    in_x: Vec<bool>,
    cut: f64,
    measure: f64,
}

impl<'a> CutScorer<'a> {
    pub(crate) fn new(nbrs: &'a [Vec<(usize, f64)>], weight: &'a [f64]) -> Self {
        CutScorer { nbrs, weight, in_x: vec![false; weight.len()], cut: 0.0, measure: 0.0 }
    }
}

impl Scorer for CutScorer<'_> {
    fn add(&mut self, v: usize) {
        for &(u, c) in &self.nbrs[v] {
            if self.in_x[u] {
                self.cut -= c;
            } else {
                self.cut += c;
            }
        }
        self.in_x[v] = true;
        self.measure += self.weight[v];
    }

    fn remove(&mut self, v: usize) {
        self.in_x[v] = false;
        for &(u, c) in &self.nbrs[v] {
            if self.in_x[u] {
                self.cut += c;
            } else {
                self.cut -= c;
            }
        }
        self.measure -= self.weight[v];
    }

    fn ratio(&self) -> f64 {
        self.cut / self.measure
    }
}

/// Cut value and measure of `x` under the same weights, summed in id order.
pub(crate) fn cut_ratio(nbrs: &[Vec<(usize, f64)>], weight: &[f64], x: &[usize]) -> (f64, f64) {
    let mut scorer = CutScorer::new(nbrs, weight);
    for &v in x {
        scorer.add(v);
    }
    (scorer.cut, scorer.measure)
}

/// Connected-set minimization of a cut ratio over allowed vertices.
pub(crate) fn min_cut_ratio(
    nbrs: &[Vec<(usize, f64)>],
    weight: &[f64],
    allowed: &[bool],
    cap: usize,
    budget: u64,
) -> Result<(Option<VertexWitness>, u64)> {
    let adj: Vec<Vec<usize>> =
        nbrs.iter().map(|l| l.iter().map(|&(u, _)| u).collect()).collect();
    let out = enumerate::minimize(&adj, allowed, cap, budget, || CutScorer::new(nbrs, weight))?;
    let witness = out.best.map(|b| {
        // recompute along the sorted witness so the stored ratio does not depend
        // on the order in which the enumeration happened to build the set
        let (boundary, measure) = cut_ratio(nbrs, weight, &b.ids);
        VertexWitness { vertex_ids: b.ids, boundary, measure, ratio: boundary / measure }
    });
    Ok((witness, out.examined))
}

fn alpha_metric_at(g: &MetricGraph, lg: &[Vec<usize>], k: usize, cap: usize, budget: u64) -> Result<(SubgraphWitness, u64)> {
    let allowed: Vec<bool> = (0..g.num_edges()).map(|e| g.edge_outside_ball(e, k)).collect();
    if !allowed.iter().any(|&a| a) {
        return Err(Error::EmptyRange(format!("no edge outside B_{k}")));
    }
    let out = enumerate::minimize(lg, &allowed, cap, budget, || EdgeScorer {
        g,
        deg_sub: vec![0; g.num_vertices()],
        deg_boundary: 0,
        volume: 0.0,
    })?;
    let best = out.best.expect("nonempty allowed set");
    Ok((boundary_degree(g, &best.ids)?, out.examined))
}

/// Ratios of the sphere balls: all edges whose endpoints have sphere ≤ n.
pub fn ball_ratios(g: &MetricGraph) -> Vec<(usize, f64)> {
    (1..=g.max_sphere())
        .map(|n| {
            let ids: Vec<usize> = g
                .edges()
                .iter()
                .filter(|e| g.vertices()[e.target].sphere <= n)
                .map(|e| e.id)
                .collect();
            (n, boundary_degree(g, &ids).expect("balls are connected").ratio)
        })
        .collect()
}

/// Minimum of deg(∂_G G̃)/mes(G̃) over connected subgraphs with at most `cap` edges.
pub fn alpha_exhaustive(g: &MetricGraph, cap: usize) -> Result<IsoReport> {
    alpha_exhaustive_budget(g, cap, DEFAULT_BUDGET)
}

pub fn alpha_exhaustive_budget(g: &MetricGraph, cap: usize, budget: u64) -> Result<IsoReport> {
    let lg = line_graph(g);
    let (w, examined) = alpha_metric_at(g, &lg, 0, cap, budget)?;
    Ok(IsoReport {
        kind: IsoKind::AlphaMetric,
        value_upper: w.ratio,
        essential_seq: vec![(0, w.ratio)],
        witness: Witness::Subgraph(w),
        enumeration_cap: cap,
        exhaustive_within_cap: true,
        examined,
        ball_ratios: ball_ratios(g),
    })
}

/// Neighbour lists with unit cut weight, and the per-vertex measure for α_d
/// (m(v)) or α_comb (deg(v)).
fn vertex_system(g: &MetricGraph, kind: IsoKind) -> (Vec<Vec<(usize, f64)>>, Vec<f64>) {
    let nbrs = (0..g.num_vertices()).map(|v| g.neighbors(v).map(|(_, u)| (u, 1.0)).collect()).collect();
    let weight = match kind {
        IsoKind::AlphaComb => g.vertices().iter().map(|v| v.ambient_degree as f64).collect(),
        _ => g.vertex_weights(),
    };
    (nbrs, weight)
}

fn vertex_allowed(g: &MetricGraph, k: usize) -> Vec<bool> {
    g.vertices().iter().map(|v| !v.frontier && v.sphere >= k).collect()
}

fn alpha_vertex_exhaustive(g: &MetricGraph, kind: IsoKind, cap: usize, budget: u64) -> Result<IsoReport> {
    let (nbrs, weight) = vertex_system(g, kind);
    let allowed = vertex_allowed(g, 0);
    let (w, examined) = min_cut_ratio(&nbrs, &weight, &allowed, cap, budget)?;
    let w = w.ok_or_else(|| Error::EmptyRange("no non-frontier vertex".into()))?;
    Ok(IsoReport {
        kind,
        value_upper: w.ratio,
        essential_seq: vec![(0, w.ratio)],
        witness: Witness::Vertices(w),
        enumeration_cap: cap,
        exhaustive_within_cap: true,
        examined,
        ball_ratios: Vec::new(),
    })
}

/// Minimum of #E_b(X)/m(X) over connected non-frontier vertex sets with |X| ≤ cap.
pub fn alpha_d_exhaustive(g: &MetricGraph, cap: usize) -> Result<IsoReport> {
    alpha_vertex_exhaustive(g, IsoKind::AlphaD, cap, DEFAULT_BUDGET)
}

pub fn alpha_d_exhaustive_budget(g: &MetricGraph, cap: usize, budget: u64) -> Result<IsoReport> {
    alpha_vertex_exhaustive(g, IsoKind::AlphaD, cap, budget)
}

/// Minimum of #∂X/deg(X) over connected non-frontier vertex sets with |X| ≤ cap.
pub fn alpha_comb_exhaustive(g: &MetricGraph, cap: usize) -> Result<IsoReport> {
    alpha_vertex_exhaustive(g, IsoKind::AlphaComb, cap, DEFAULT_BUDGET)
}

/// Per-kind reports whose essential sequences run over k = 0..=k_max, each
/// entry the minimum over the complement of the sphere ball B_k.
pub fn essential_iso_sequences(g: &MetricGraph, k_max: usize, cap: usize) -> Result<Vec<IsoReport>> {
    essential_iso_sequences_budget(g, k_max, cap, DEFAULT_BUDGET)
}

pub fn essential_iso_sequences_budget(
    g: &MetricGraph,
    k_max: usize,
    cap: usize,
    budget: u64,
) -> Result<Vec<IsoReport>> {
    if k_max > g.max_sphere() {
        return Err(Error::Parameter(format!(
            "k_max {k_max} exceeds truncation depth {}",
            g.max_sphere()
        )));
    }
    let lg = line_graph(g);
    let mut metric_seq = Vec::new();
    let mut metric_first = None;
    let mut examined = 0;
    for k in 0..=k_max {
        let (w, n) = alpha_metric_at(g, &lg, k, cap, budget)?;
        examined += n;
        metric_seq.push((k, w.ratio));
        metric_first.get_or_insert(w);
    }
    let w = metric_first.unwrap();
    let mut reports = vec![IsoReport {
        kind: IsoKind::AlphaMetric,
        value_upper: w.ratio,
        witness: Witness::Subgraph(w),
        essential_seq: metric_seq,
        enumeration_cap: cap,
        exhaustive_within_cap: true,
        examined,
        ball_ratios: ball_ratios(g),
    }];

    for kind in [IsoKind::AlphaD, IsoKind::AlphaComb] {
        let (nbrs, weight) = vertex_system(g, kind);
        let mut seq = Vec::new();
        let mut first = None;
        let mut examined = 0;
        for k in 0..=k_max {
            let (w, n) = min_cut_ratio(&nbrs, &weight, &vertex_allowed(g, k), cap, budget)?;
            let w = w.ok_or_else(|| Error::EmptyRange(format!("no non-frontier vertex outside B_{k}")))?;
            examined += n;
            seq.push((k, w.ratio));
            first.get_or_insert(w);
        }
        let w = first.unwrap();
        reports.push(IsoReport {
            kind,
            value_upper: w.ratio,
            witness: Witness::Vertices(w),
            essential_seq: seq,
            enumeration_cap: cap,
            exhaustive_within_cap: true,
            examined,
            ball_ratios: Vec::new(),
        });
    }
    Ok(reports)
}

/// #E_b(X) and m(X) for an explicit vertex set.
pub fn vertex_set_ratio(g: &MetricGraph, x: &[usize], kind: IsoKind) -> Result<VertexWitness> {
    for &v in x {
        g.vertex(v)?;
    }
    let mut ids = x.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let (nbrs, weight) = vertex_system(g, kind);
    let (boundary, measure) = cut_ratio(&nbrs, &weight, &ids);
    Ok(VertexWitness { vertex_ids: ids, boundary, measure, ratio: boundary / measure })
}

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_TOL * lhs.abs().max(rhs.abs()).max(1.0)
}

/// Checks each linking inequality on matched witnesses. Any failure signals
/// an implementation bug, since every inequality holds pointwise.
pub fn check_connection_inequalities(
    g: &MetricGraph,
    reports: &[IsoReport],
    curvature: Option<&CurvatureProfile>,
) -> Result<Vec<Verdict>> {
    let ex = g.length_extremes(&[])?;
    let (ell_lo, ell_hi) = (ex.ell_star_lower, ex.ell_star_upper);
    let mut out = Vec::new();
    let find = |kind| reports.iter().find(|r| r.kind == kind);

    if let Some(r) = find(IsoKind::AlphaMetric) {
        let w = r.subgraph_witness().ok_or_else(|| Error::Parameter("alpha report without subgraph witness".into()))?;
        let again = boundary_degree(g, &w.edge_ids)?;
        out.push(Verdict::le(
            "alpha witness recomputes",
            (again.ratio - w.ratio).abs(),
            0.0,
        ));
        out.push(Verdict::le("alpha <= 2/ell*", r.value_upper, 2.0 / ell_hi));
        // deg(∂) = #E_1 + 2 #E_2
        let bset: BTreeSet<usize> = w.boundary_vertex_ids.iter().copied().collect();
        let mut e1e2 = 0;
        for &e in &w.edge_ids {
            let edge = &g.edges()[e];
            e1e2 += bset.contains(&edge.source) as usize + bset.contains(&edge.target) as usize;
        }
        out.push(Verdict::eq("boundary degree = #E1 + 2#E2", w.deg_boundary as f64, e1e2 as f64));

        // 2/ratio <= m(X)/#E_b(X) + ℓ* with X = Ṽ ∖ ∂G̃
        let x: Vec<usize> = w.vertex_ids.iter().copied().filter(|v| !bset.contains(v)).collect();
        if !x.is_empty() && w.ratio > 0.0 {
            let xw = vertex_set_ratio(g, &x, IsoKind::AlphaD)?;
            if xw.boundary > 0.0 {
                out.push(Verdict::le("2/alpha <= 1/alpha_d + ell* (alpha witness)", 2.0 / w.ratio, 1.0 / xw.ratio + ell_hi));
            }
        }

        if let Some(p) = curvature {
            if p.inf_k > 0.0 {
                out.push(Verdict::le("alpha witness >= inf K", p.inf_k, w.ratio));
            }
            let local = w
                .vertex_ids
                .iter()
                .map(|&v| p.k[v])
                .fold(f64::INFINITY, f64::min);
            if local > 0.0 {
                out.push(Verdict::le("alpha witness >= min K over witness", local, w.ratio));
            }
        }
    }

    if let Some(r) = find(IsoKind::AlphaD) {
        let w = r.vertex_witness().ok_or_else(|| Error::Parameter("alpha_d report without vertex witness".into()))?;
        // G̃_X: all edges with an endpoint in X
        let xs: BTreeSet<usize> = w.vertex_ids.iter().copied().collect();
        let edges: Vec<usize> = g
            .edges()
            .iter()
            .filter(|e| xs.contains(&e.source) || xs.contains(&e.target))
            .map(|e| e.id)
            .collect();
        if let Ok(sub) = boundary_degree(g, &edges) {
            out.push(Verdict::le("alpha/2 <= alpha_d (alpha_d witness)", sub.ratio / 2.0, w.ratio));
        }
        let comb = vertex_set_ratio(g, &w.vertex_ids, IsoKind::AlphaComb)?;
        out.push(Verdict::le("alpha_comb/ell* <= alpha_d (alpha_d witness)", comb.ratio / ell_hi, w.ratio));
        out.push(Verdict::le("alpha_d <= alpha_comb/ell_* (alpha_d witness)", w.ratio, comb.ratio / ell_lo));
        if let Some(p) = curvature {
            if p.inf_k_d >= 0.0 {
                out.push(Verdict::le("alpha_d witness >= inf K_d", p.inf_k_d, w.ratio));
            }
        }
    }

    if let Some(r) = find(IsoKind::AlphaComb) {
        let w = r.vertex_witness().ok_or_else(|| Error::Parameter("alpha_comb report without vertex witness".into()))?;
        let d = vertex_set_ratio(g, &w.vertex_ids, IsoKind::AlphaD)?;
        out.push(Verdict::le("alpha_comb/ell* <= alpha_d (alpha_comb witness)", w.ratio / ell_hi, d.ratio));
        out.push(Verdict::le("alpha_d <= alpha_comb/ell_* (alpha_comb witness)", d.ratio, w.ratio / ell_lo));
    }

    for r in reports {
        let monotone = r.essential_seq.windows(2).all(|p| le(p[0].1, p[1].1));
        out.push(Verdict::check(&format!("{:?} essential sequence nondecreasing", r.kind), monotone));
    }
    Ok(out)
}
