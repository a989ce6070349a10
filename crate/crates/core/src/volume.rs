//! Metric balls, volume growth rates μ, μ_*, μ_d and the Brooks-type upper
//! bound for the bottom of the essential spectrum.

use std::cmp::Ordering as CmpOrdering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{Bound, Side, Target};
use crate::error::{Error, Result};
use crate::fit;
use crate::graph::{Condition, MetricGraph, SaVerdict, SelfAdjointnessDiagnostics};

/// Number of points of the default radius grid.
pub const GRID_POINTS: usize = 40;

/// Default cap on edge visits spent by [`mu_star_estimate`].
pub const DEFAULT_SAMPLE_BUDGET: u64 = 200_000_000;

/// A point of the metric graph: a vertex or a position along an edge,
/// measured from its source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Vertex { id: usize },
    Edge { id: usize, offset: f64 },
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex { id } => write!(f, "vertex:{id}"),
            Point::Edge { id, offset } => write!(f, "edge:{id}:{offset}"),
        }
    }
}

/// Parses `vertex:ID` or `edge:ID:OFFSET`. `root` is resolved by the caller.
impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("cannot parse point {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["vertex", id] => Ok(Point::Vertex { id: id.parse().map_err(|_| bad())? }),
            ["edge", id, off] => Ok(Point::Edge {
                id: id.parse().map_err(|_| bad())?,
                offset: off.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl Point {
    /// Checks the point exists, returning `(vertex, distance)` seeds.
    fn seeds(&self, g: &MetricGraph) -> Result<Vec<(usize, f64)>> {
        match *self {
            Point::Vertex { id } => {
                g.vertex(id)?;
                Ok(vec![(id, 0.0)])
            }
            Point::Edge { id, offset } => {
                let e = g.edge(id)?;
                if !(0.0..=e.length).contains(&offset) {
                    return Err(Error::Parameter(format!(
                        "offset {offset} outside edge {id} of length {}",
                        e.length
                    )));
                }
                Ok(vec![(e.source, offset), (e.target, e.length - offset)])
            }
        }
    }

    pub fn midpoint(g: &MetricGraph, e: usize) -> Point {
        Point::Edge { id: e, offset: g.edges()[e].length / 2.0 }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> CmpOrdering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<CmpOrdering> {
        Some(self.cmp(other))
    }
}

/// Reusable bounded-Dijkstra workspace: only touched entries are reset.
struct Scratch {
    dist: Vec<f64>,
    touched: Vec<usize>,
    heap: BinaryHeap<HeapItem>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { dist: vec![f64::INFINITY; n], touched: Vec::new(), heap: BinaryHeap::new() }
    }

    /// ρ₀ distances up to `cutoff` (exclusive); returns edge visits.
    fn run(&mut self, g: &MetricGraph, seeds: &[(usize, f64)], cutoff: f64) -> u64 {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
        }
        self.touched.clear();
        self.heap.clear();
        for &(v, d) in seeds {
            if d < cutoff && d < self.dist[v] {
                if self.dist[v] == f64::INFINITY {
                    self.touched.push(v);
                }
                self.dist[v] = d;
                self.heap.push(HeapItem(d, v));
            }
        }
        let mut work = 0;
        while let Some(HeapItem(d, v)) = self.heap.pop() {
            if d > self.dist[v] {
                continue;
            }
            for &e in g.incident(v) {
                work += 1;
                let edge = &g.edges()[e];
                let u = edge.other(v);
                let nd = d + edge.length;
                if nd < cutoff && nd < self.dist[u] {
                    if self.dist[u] == f64::INFINITY {
                        self.touched.push(u);
                    }
                    self.dist[u] = nd;
                    self.heap.push(HeapItem(nd, u));
                }
            }
        }
        work
    }

    /// Ball volumes at each radius (all ≤ the cutoff used in `run`).
    fn volumes(&self, g: &MetricGraph, center: &Point, radii: &[f64]) -> Vec<f64> {
        let reach = |d: f64, r: f64| (r - d).max(0.0);
        let mut out = vec![0.0; radii.len()];
        let center_edge = match *center {
            Point::Edge { id, offset } => {
                // the center splits its edge into [source, c] and [c, target]
                let e = &g.edges()[id];
                let (ds, dt) = (self.dist[e.source], self.dist[e.target]);
                for (slot, &r) in out.iter_mut().zip(radii) {
                    *slot += offset.min(r + reach(ds, r)) + (e.length - offset).min(r + reach(dt, r));
                }
                Some(id)
            }
            Point::Vertex { .. } => None,
        };
        for &v in &self.touched {
            let dv = self.dist[v];
            for &e in g.incident(v) {
                let edge = &g.edges()[e];
                let du = self.dist[edge.other(v)];
                // count each edge once: from its only reached endpoint, or
                // from the smaller id when both are reached
                if Some(e) == center_edge || (du.is_finite() && edge.other(v) < v) {
                    continue;
                }
                for (slot, &r) in out.iter_mut().zip(radii) {
                    *slot += edge.length.min(reach(dv, r) + reach(du, r));
                }
            }
        }
        out
    }

    /// Σ m(u) over vertices with distance < r, per radius.
    fn weights(&self, weights: &[f64], radii: &[f64]) -> Vec<f64> {
        radii
            .iter()
            .map(|&r| self.touched.iter().filter(|&&v| self.dist[v] < r).map(|&v| weights[v]).sum())
            .collect()
    }
}

/// Volumes of metric balls around one center over a radius grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallVolumeTable {
    pub center: Point,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// Largest radius whose ball stays clear of the truncation frontier.
    pub valid_radius: f64,
    pub censored: Vec<bool>,
}

/// ρ₀ distance from every vertex to the nearest frontier vertex.
pub fn frontier_distances(g: &MetricGraph) -> Vec<f64> {
    let seeds: Vec<(usize, f64)> = g.vertices().iter().filter(|v| v.frontier).map(|v| (v.id, 0.0)).collect();
    let costs: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
    g.shortest_paths(&seeds, &costs, f64::INFINITY)
}

fn point_valid_radius(g: &MetricGraph, fd: &[f64], p: &Point) -> f64 {
    match *p {
        Point::Vertex { id } => fd[id],
        Point::Edge { id, offset } => {
            let e = &g.edges()[id];
            (fd[e.source] + offset).min(fd[e.target] + e.length - offset)
        }
    }
}

/// Radius of the largest ball around `center` that avoids the frontier.
pub fn valid_radius(g: &MetricGraph, center: &Point) -> Result<f64> {
    center.seeds(g)?;
    Ok(point_valid_radius(g, &frontier_distances(g), center))
}

/// Volume of the open ball of radius `r` around `center`.
pub fn ball_volume(g: &MetricGraph, center: &Point, r: f64) -> Result<f64> {
    Ok(volume_table(g, center, &[r])?.volumes[0])
}

/// Ball volumes around `center` at each radius in `radii`.
pub fn volume_table(g: &MetricGraph, center: &Point, radii: &[f64]) -> Result<BallVolumeTable> {
    let seeds = center.seeds(g)?;
    if let Some(r) = radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::Parameter(format!("radius must be finite and nonnegative, got {r}")));
    }
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let mut scratch = Scratch::new(g.num_vertices());
    scratch.run(g, &seeds, rmax);
    let volumes = scratch.volumes(g, center, radii);
    let valid = point_valid_radius(g, &frontier_distances(g), center);
    Ok(BallVolumeTable {
        center: *center,
        radii: radii.to_vec(),
        censored: radii.iter().map(|&r| r > valid).collect(),
        volumes,
        valid_radius: valid,
    })
}

/// `n` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Which model describes the tail of log vol(r) better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// log vol ≈ a r + c
    Exponential,
    /// log vol ≈ p log r + c
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuEstimate {
    pub center: Point,
    /// `(r, log vol / r)` over uncensored grid radii.
    pub sequence: Vec<(f64, f64)>,
    /// `(a, b)` of log vol / r ≈ a + b/r over the tail.
    pub tail_fit: (f64, f64),
    pub growth: GrowthModel,
    /// Tail-fit intercept, or 0 when growth is polynomial.
    pub estimate: f64,
    pub valid_radius: f64,
}

/// Default grid: 40 log-spaced radii in [ℓ_*, valid_radius]; graphs without
/// frontier use the center's eccentricity.
fn default_grid(g: &MetricGraph, center: &Point, valid: f64) -> Result<Vec<f64>> {
    let ell = g.length_extremes(&[])?.ell_star_lower;
    let top = if valid.is_finite() {
        valid
    } else {
        let seeds = center.seeds(g)?;
        let costs: Vec<f64> = g.edges().iter().map(|e| e.length).collect();
        let d = g.shortest_paths(&seeds, &costs, f64::INFINITY);
        g.edges().iter().map(|e| d[e.source].max(d[e.target])).fold(0.0, f64::max)
    };
    if top < 5.0 * ell {
        return Err(Error::EmptyRange(format!(
            "valid radius {top} is shorter than five shortest edges ({ell} each)"
        )));
    }
    Ok(log_grid(ell, top, GRID_POINTS))
}

/// Fits both growth models to the tail of `(r, log value)` and extracts μ.
fn growth_fit(points: &[(f64, f64)]) -> Result<((f64, f64), GrowthModel, f64)> {
    let tail = fit::tail(points, 5);
    let (rs, logs): (Vec<f64>, Vec<f64>) = tail.iter().copied().unzip();
    let ratios: Vec<f64> = rs.iter().zip(&logs).map(|(r, l)| l / r).collect();
    let (a, b) = fit::inverse_tail(&rs, &ratios)
        .ok_or_else(|| Error::EmptyRange("too few radii for a tail fit".into()))?;
    let lr: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let exp = fit::affine(&rs, &logs).map_or(f64::INFINITY, |f| f.sse);
    let poly = fit::affine(&lr, &logs).map_or(f64::INFINITY, |f| f.sse);
    let model = if poly < exp { GrowthModel::Polynomial } else { GrowthModel::Exponential };
    let estimate = match model {
        GrowthModel::Polynomial => 0.0,
        GrowthModel::Exponential => a.max(0.0),
    };
    Ok(((a, b), model, estimate))
}

fn mu_from_table(center: Point, radii: &[f64], values: &[f64], valid: f64) -> Result<MuEstimate> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter(|(r, v)| **r <= valid && **v > 0.0)
        .map(|(&r, &v)| (r, v.ln()))
        .collect();
    let (tail_fit, growth, estimate) = growth_fit(&pts)?;
    Ok(MuEstimate {
        center,
        sequence: pts.iter().map(|&(r, l)| (r, l / r)).collect(),
        tail_fit,
        growth,
        estimate,
        valid_radius: valid,
    })
}

/// Volume growth rate at `center` from log vol(r)/r over the default grid.
pub fn mu_estimate(g: &MetricGraph, center: &Point) -> Result<MuEstimate> {
    let valid = valid_radius(g, center)?;
    let grid = default_grid(g, center, valid)?;
    let table = volume_table(g, center, &grid)?;
    mu_from_table(*center, &table.radii, &table.volumes, valid)
}

/// log vol(r)/r at a single radius, with a flag when r exceeds the valid radius.
pub fn log_volume_ratio(g: &MetricGraph, center: &Point, r: f64) -> Result<(f64, bool)> {
    let t = volume_table(g, center, &[r])?;
    Ok((t.volumes[0].ln() / r, t.censored[0]))
}

/// Discrete volume growth from m(B_r(v)) = Σ_{u ∈ B_r(v)} m(u).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuDEstimate {
    pub mu: MuEstimate,
    /// `(r, m(B_r), mes(B_r), mes(B_{r+ℓ*}))` over the grid.
    pub sandwich: Vec<(f64, f64, f64, f64)>,
    /// Whether mes(B_r) ≤ m(B_r) ≤ 2 mes(B_{r+ℓ*}) held at every grid radius.
    pub sandwich_holds: bool,
}

pub fn mu_d_estimate(g: &MetricGraph, center: usize) -> Result<MuDEstimate> {
    let p = Point::Vertex { id: center };
    let valid = valid_radius(g, &p)?;
    let grid = default_grid(g, &p, valid)?;
    let ell = g.length_extremes(&[])?.ell_star_upper;
    let shifted: Vec<f64> = grid.iter().map(|r| r + ell).collect();
    let mut scratch = Scratch::new(g.num_vertices());
    scratch.run(g, &p.seeds(g)?, shifted.last().copied().unwrap_or(0.0));
    let weights = g.vertex_weights();
    let m_ball = scratch.weights(&weights, &grid);
    let vol = scratch.volumes(g, &p, &grid);
    let vol_shift = scratch.volumes(g, &p, &shifted);
    let sandwich: Vec<(f64, f64, f64, f64)> =
        (0..grid.len()).map(|i| (grid[i], m_ball[i], vol[i], vol_shift[i])).collect();
    let tol = 1e-12;
    let sandwich_holds = sandwich
        .iter()
        .all(|&(_, m, v, vs)| v <= m * (1.0 + tol) && m <= 2.0 * vs * (1.0 + tol));
    Ok(MuDEstimate { mu: mu_from_table(p, &grid, &m_ball, valid)?, sandwich, sandwich_holds })
}

/// One sampled ratio vol_x(r)/vol_x(1).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StarSample {
    pub center: Point,
    pub ratio: f64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuStarEstimate {
    pub r_probe: f64,
    /// Smallest uncensored ratio at `r_probe` and its center.
    pub min_ratio: Option<StarSample>,
    /// Smallest ratio at `r_probe` including censored centers.
    pub min_ratio_any: Option<StarSample>,
    /// Ratios at `r_probe` for every sampled center class representative.
    pub samples: Vec<StarSample>,
    /// `(r, vol_*(r))` over uncensored samples.
    pub vol_star: Vec<(f64, f64)>,
    /// `(r, log vol_*(r) / r)`.
    pub sequence: Vec<(f64, f64)>,
    /// Centers visited before the budget ran out; equals the class count
    /// when `partial` is false.
    pub sampled: usize,
    pub partial: bool,
}

/// Sample centers: non-frontier vertices and edge midpoints, with twin
/// leaves (same neighbour, length and condition) collapsed to one
/// representative since they are exchanged by an automorphism.
pub fn sample_centers(g: &MetricGraph) -> Vec<Point> {
    let mut seen: BTreeMap<(usize, u64, u8), ()> = BTreeMap::new();
    let mut twin = |v: usize| -> bool {
        let vx = &g.vertices()[v];
        if g.degree(v) != 1 || vx.frontier {
            return false;
        }
        let e = &g.edges()[g.incident(v)[0]];
        let cond = match vx.condition {
            Condition::Kirchhoff => 0,
            Condition::Dirichlet => 1,
            Condition::Neumann => 2,
        };
        seen.insert((e.other(v), e.length.to_bits(), cond), ()).is_some()
    };
    let mut out = Vec::new();
    let mut leaf_kept = vec![true; g.num_vertices()];
    for v in g.vertices() {
        if v.frontier {
            continue;
        }
        if twin(v.id) {
            leaf_kept[v.id] = false;
            continue;
        }
        out.push(Point::Vertex { id: v.id });
    }
    for e in g.edges() {
        let leaf = [e.source, e.target].into_iter().find(|&u| g.degree(u) == 1);
        if leaf.is_some_and(|u| !leaf_kept[u]) {
            continue;
        }
        out.push(Point::midpoint(g, e.id));
    }
    out
}

/// Samples of vol_x(r)/vol_x(1) and the resulting vol_*(r) and μ_* sequence
/// on 20 log-spaced radii in [1, r_probe].
pub fn mu_star_estimate(g: &MetricGraph, centers: &[Point], r_probe: f64, budget: u64) -> Result<MuStarEstimate> {
    if !(r_probe.is_finite() && r_probe > 1.0) {
        return Err(Error::Parameter(format!("probe radius must exceed 1, got {r_probe}")));
    }
    let fd = frontier_distances(g);
    let mut radii = log_grid(1.0, r_probe, 20);
    radii[0] = 1.0;
    *radii.last_mut().unwrap() = r_probe;
    for c in centers {
        c.seeds(g)?;
    }

    const CHUNK: usize = 64;
    let mut rows: Vec<(Point, Vec<f64>, f64)> = Vec::new();
    let mut work = 0u64;
    let mut partial = false;
    for chunk in centers.chunks(CHUNK) {
        if work > budget {
            partial = true;
            break;
        }
        let done: Vec<(Point, Vec<f64>, f64, u64)> = chunk
            .par_iter()
            .map_init(
                || Scratch::new(g.num_vertices()),
                |s, c| {
                    let w = s.run(g, &c.seeds(g).unwrap(), r_probe);
                    (*c, s.volumes(g, c, &radii), point_valid_radius(g, &fd, c), w)
                },
            )
            .collect();
        for (c, vols, valid, w) in done {
            work += w;
            rows.push((c, vols, valid));
        }
    }

    let samples: Vec<StarSample> = rows
        .iter()
        .map(|(c, vols, valid)| StarSample {
            center: *c,
            ratio: vols[vols.len() - 1] / vols[0],
            censored: r_probe > *valid,
        })
        .collect();
    let pick = |uncensored_only: bool| {
        samples
            .iter()
            .filter(|s| !(uncensored_only && s.censored))
            .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
            .cloned()
    };
    let vol_star: Vec<(f64, f64)> = radii
        .iter()
        .enumerate()
        .filter_map(|(i, &r)| {
            rows.iter()
                .filter(|(_, _, valid)| r <= *valid)
                .map(|(_, v, _)| v[i] / v[0])
                .min_by(f64::total_cmp)
                .map(|m| (r, m))
        })
        .collect();
    Ok(MuStarEstimate {
        r_probe,
        min_ratio: pick(true),
        min_ratio_any: pick(false),
        sequence: vol_star.iter().map(|&(r, v)| (r, v.ln() / r)).collect(),
        vol_star,
        sampled: rows.len(),
        samples,
        partial,
    })
}

/// λ₀^ess ≤ μ²/4 and λ₀^ess ≤ μ_*²/4, applicable only when the
/// completeness trend for ρ₀ holds.
pub fn brooks_upper(mu: f64, mu_star: Option<f64>, sa: &SelfAdjointnessDiagnostics) -> Vec<Bound> {
    let complete = sa.has(SaVerdict::Rho0Complete);
    let why = "completeness of (V, rho0) not supported by the truncation trend";
    let mut out = vec![Bound::new(
        "lambda0_ess_brooks_mu",
        Target::Lambda0Ess,
        Side::Upper,
        mu * mu / 4.0,
        "volume growth: lambda0_ess <= mu^2/4",
    )
    .gated(complete, why)
    .noted(&sa.label)];
    if let Some(ms) = mu_star {
        out.push(
            Bound::new(
                "lambda0_ess_brooks_mu_star",
                Target::Lambda0Ess,
                Side::Upper,
                ms * ms / 4.0,
                "uniform volume growth: lambda0_ess <= mu_*^2/4",
            )
            .gated(complete, why)
            .noted(&sa.label),
        );
    }
    if !complete {
        for b in &mut out {
            b.note = why.to_string();
        }
    }
    out
}

/// Writes `r,vol,log_vol_over_r` rows.
pub fn write_csv(table: &BallVolumeTable, out: impl std::io::Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "vol", "log_vol_over_r", "censored"])?;
    for ((r, v), c) in table.radii.iter().zip(&table.volumes).zip(&table.censored) {
        w.write_record([r.to_string(), v.to_string(), (v.ln() / r).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
