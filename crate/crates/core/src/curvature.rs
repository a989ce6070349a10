//! Vertex curvatures K, K_comb, K_d of an oriented metric graph and the
//! isoperimetric and spectral lower bounds they imply.

use std::io::Write;

use serde::Serialize;

use crate::bounds::{Bound, Side, Target};
use crate::error::Result;
use crate::fit;
use crate::graph::{LengthExtremes, MetricGraph};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureProfile {
    /// K(v) = (#out − #in)/#out · inf_{out} 1/|e|, or −∞ without outgoing edges.
    pub k: Vec<f64>,
    /// K_comb(v) = 1 − #in/#out, or −∞.
    pub k_comb: Vec<f64>,
    /// K_d(v) = (#out − #in)/m(v).
    pub k_d: Vec<f64>,
    pub inf_k: f64,
    pub inf_k_comb: f64,
    pub inf_k_d: f64,
    /// `(k, inf over non-frontier vertices with sphere ≥ k)`.
    pub k_ess_seq: Vec<(usize, f64)>,
    pub k_comb_ess_seq: Vec<(usize, f64)>,
    pub k_d_ess_seq: Vec<(usize, f64)>,
    /// `(n, min over non-frontier vertices of sphere n)`, used for extrapolation.
    pub k_sphere_min: Vec<(usize, f64)>,
    pub k_comb_sphere_min: Vec<(usize, f64)>,
    pub label: String,
}

/// Liminf surrogate label for sphere-ordered infima.
pub const ESS_LABEL: &str = "liminf over vertices approximated by inf over spheres >= k";

pub fn curvature_profile(g: &MetricGraph) -> CurvatureProfile {
    let n = g.num_vertices();
    let mut k = vec![0.0; n];
    let mut k_comb = vec![0.0; n];
    let mut k_d = vec![0.0; n];
    for v in 0..n {
        let mut n_out = 0usize;
        let mut n_in = 0usize;
        let mut longest_out = 0.0f64;
        for &e in g.incident(v) {
            let edge = &g.edges()[e];
            if edge.source == v {
                n_out += 1;
                longest_out = longest_out.max(edge.length);
            } else {
                n_in += 1;
            }
        }
        let diff = n_out as f64 - n_in as f64;
        if n_out == 0 {
            k[v] = f64::NEG_INFINITY;
            k_comb[v] = f64::NEG_INFINITY;
        } else {
            k_comb[v] = diff / n_out as f64;
            k[v] = k_comb[v] / longest_out;
        }
        k_d[v] = diff / g.weight_unchecked(v);
    }

    let depth = g.max_sphere();
    let ess = |vals: &[f64]| -> (f64, Vec<(usize, f64)>, Vec<(usize, f64)>) {
        let mut per_sphere = vec![f64::INFINITY; depth + 1];
        let mut present = vec![false; depth + 1];
        for v in g.vertices().iter().filter(|v| !v.frontier) {
            per_sphere[v.sphere] = per_sphere[v.sphere].min(vals[v.id]);
            present[v.sphere] = true;
        }
        let minima: Vec<(usize, f64)> =
            (0..=depth).filter(|&s| present[s]).map(|s| (s, per_sphere[s])).collect();
        let mut seq = Vec::with_capacity(minima.len());
        let mut running = f64::INFINITY;
        for &(s, x) in minima.iter().rev() {
            running = running.min(x);
            seq.push((s, running));
        }
        seq.reverse();
        let inf = seq.first().map_or(f64::INFINITY, |p| p.1);
        (inf, seq, minima)
    };
    let (inf_k, k_ess_seq, k_sphere_min) = ess(&k);
    let (inf_k_comb, k_comb_ess_seq, k_comb_sphere_min) = ess(&k_comb);
    let (inf_k_d, k_d_ess_seq, _) = ess(&k_d);

    CurvatureProfile {
        k,
        k_comb,
        k_d,
        inf_k,
        inf_k_comb,
        inf_k_d,
        k_ess_seq,
        k_comb_ess_seq,
        k_d_ess_seq,
        k_sphere_min,
        k_comb_sphere_min,
        label: ESS_LABEL.to_string(),
    }
}

/// Extrapolated limit of a sequence indexed by exclusion radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailLimit {
    pub value: f64,
    pub diverging: bool,
    /// `(a, b)` of the fit a + b/k over the tail, when one was made.
    pub fit: Option<(f64, f64)>,
}

/// Fits a + b/k over the last half of the sequence. The value is the
/// smaller of the intercept and the last term, so an increasing tail is
/// never extrapolated upward; a tail growing like a positive power of k is
/// flagged as diverging and keeps its last term.
pub fn extrapolate(seq: &[(usize, f64)]) -> TailLimit {
    let pts: Vec<(f64, f64)> =
        seq.iter().filter(|(k, _)| *k >= 1).map(|&(k, v)| (k as f64, v)).collect();
    let Some(&(_, last)) = pts.last() else {
        let value = seq.last().map_or(f64::NAN, |p| p.1);
        return TailLimit { value, diverging: false, fit: None };
    };
    if !last.is_finite() {
        return TailLimit { value: last, diverging: last == f64::INFINITY, fit: None };
    }
    let tail = fit::tail(&pts, 3);
    let tail: Vec<(f64, f64)> = tail.iter().copied().filter(|p| p.1.is_finite()).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
    if xs.len() < 2 {
        return TailLimit { value: last, diverging: false, fit: None };
    }
    if ys.iter().all(|&y| y > 0.0) && fit::loglog_slope(&xs, &ys).is_some_and(|s| s > 0.25) {
        return TailLimit { value: last, diverging: true, fit: None };
    }
    match fit::inverse_tail(&xs, &ys) {
        Some((a, b)) => TailLimit { value: a.min(last), diverging: false, fit: Some((a, b)) },
        None => TailLimit { value: last, diverging: false, fit: None },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssentialCurvature {
    pub k_ess_seq: Vec<(usize, f64)>,
    pub k_comb_ess_seq: Vec<(usize, f64)>,
    pub k_ess: TailLimit,
    pub k_comb_ess: TailLimit,
}

/// Sequences as computed, limits extrapolated from the per-sphere minima
/// (a truncated suffix infimum of a decreasing sequence is pinned to the
/// last sphere and carries no trend).
pub fn essential_curvature_limits(p: &CurvatureProfile) -> EssentialCurvature {
    EssentialCurvature {
        k_ess_seq: p.k_ess_seq.clone(),
        k_comb_ess_seq: p.k_comb_ess_seq.clone(),
        k_ess: extrapolate(&p.k_sphere_min),
        k_comb_ess: extrapolate(&p.k_comb_sphere_min),
    }
}

/// `(n, K_comb(S_n) / ℓ*_ess(n))` for spheres present in both sequences.
pub fn kcomb_over_ell_seq(p: &CurvatureProfile, extremes: &LengthExtremes) -> Vec<(usize, f64)> {
    p.k_comb_sphere_min
        .iter()
        .filter_map(|&(k, kc)| {
            extremes.ell_ess_upper_seq.iter().find(|(k2, _)| *k2 == k).map(|&(_, l)| (k, kc / l))
        })
        .collect()
}

/// Lower bounds on α, α_ess, α_d, λ₀, λ₀^ess and λ₀(discrete) implied by
/// curvature. Bounds whose positivity hypothesis fails are kept, flagged
/// inapplicable.
pub fn curvature_alpha_bounds(p: &CurvatureProfile, extremes: &LengthExtremes) -> Vec<Bound> {
    let ell = extremes.ell_star_upper;
    let mut out = Vec::new();
    let pos_k = p.inf_k > 0.0 && p.inf_k.is_finite();
    let pos_comb = p.inf_k_comb > 0.0 && p.inf_k_comb.is_finite();
    let nonneg_d = p.inf_k_d >= 0.0 && p.inf_k_d.is_finite();

    let a_k = p.inf_k.max(0.0);
    out.push(
        Bound::new("alpha_curvature_k", Target::Alpha, Side::Lower, a_k, "curvature: alpha >= inf K")
            .gated(pos_k, "K is not positive"),
    );
    out.push(
        Bound::new(
            "lambda0_curvature_k",
            Target::Lambda0,
            Side::Lower,
            a_k * a_k / 4.0,
            "cheeger with curvature: lambda0 >= (inf K)^2/4",
        )
        .gated(pos_k, "K is not positive"),
    );

    let a_comb = p.inf_k_comb.max(0.0) / ell;
    out.push(
        Bound::new(
            "alpha_curvature_kcomb",
            Target::Alpha,
            Side::Lower,
            a_comb,
            "combinatorial curvature: alpha >= K_comb / ell*",
        )
        .gated(pos_comb, "K_comb is not positive"),
    );
    out.push(
        Bound::new(
            "lambda0_curvature_kcomb",
            Target::Lambda0,
            Side::Lower,
            a_comb * a_comb / 4.0,
            "cheeger with combinatorial curvature: lambda0 >= K_comb^2/(4 ell*^2)",
        )
        .gated(pos_comb, "K_comb is not positive"),
    );

    let a_d = if p.inf_k_d > 0.0 { 2.0 / (1.0 / p.inf_k_d + ell) } else { 0.0 };
    out.push(
        Bound::new(
            "alpha_d_curvature_kd",
            Target::AlphaD,
            Side::Lower,
            p.inf_k_d.max(0.0),
            "discrete curvature: alpha_d >= inf K_d",
        )
        .gated(nonneg_d, "K_d is negative"),
    );
    out.push(
        Bound::new(
            "alpha_curvature_kd",
            Target::Alpha,
            Side::Lower,
            a_d,
            "discrete curvature: 2/alpha <= 1/K_d + ell*",
        )
        .gated(nonneg_d, "K_d is negative"),
    );
    out.push(
        Bound::new(
            "lambda0_curvature_kd",
            Target::Lambda0,
            Side::Lower,
            a_d * a_d / 4.0,
            "cheeger with discrete curvature: lambda0 >= (2/(1/K_d + ell*))^2/4",
        )
        .gated(nonneg_d, "K_d is negative"),
    );
    let kd = p.inf_k_d.max(0.0);
    out.push(
        Bound::new(
            "lambda0_discrete_curvature_kd",
            Target::Lambda0Discrete,
            Side::Lower,
            kd * kd / 2.0,
            "discrete cheeger with curvature: lambda0(h) >= K_d^2/2",
        )
        .gated(nonneg_d, "K_d is negative"),
    );

    let ess = essential_curvature_limits(p);
    let k_ess = ess.k_ess.value.max(0.0);
    out.push(
        Bound::new(
            "alpha_ess_curvature_k",
            Target::AlphaEss,
            Side::Lower,
            k_ess,
            "essential curvature: alpha_ess >= K_ess",
        )
        .gated(pos_k, "K is not positive")
        .noted_if_applicable(ESS_LABEL),
    );
    out.push(
        Bound::new(
            "lambda0_ess_curvature_k",
            Target::Lambda0Ess,
            Side::Lower,
            k_ess * k_ess / 4.0,
            "cheeger at infinity with curvature: lambda0_ess >= K_ess^2/4",
        )
        .gated(pos_k, "K is not positive")
        .noted_if_applicable(ESS_LABEL),
    );
    let ratio = extrapolate(&kcomb_over_ell_seq(p, extremes)).value.max(0.0);
    out.push(
        Bound::new(
            "lambda0_ess_curvature_kcomb",
            Target::Lambda0Ess,
            Side::Lower,
            ratio * ratio / 4.0,
            "cheeger at infinity with combinatorial curvature: lambda0_ess >= (K_comb_ess/ell*_ess)^2/4",
        )
        .gated(p.inf_k_comb >= 0.0, "K_comb is negative")
        .noted_if_applicable(ESS_LABEL),
    );
    out
}

trait NoteExt {
    fn noted_if_applicable(self, note: &str) -> Self;
}

impl NoteExt for Bound {
    fn noted_if_applicable(self, note: &str) -> Self {
        if self.applicable {
            self.noted(note)
        } else {
            self
        }
    }
}

fn fmt_curv(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.17e}")
    }
}

/// Per-vertex curvature table: id, sphere, frontier, K, K_comb, K_d.
pub fn write_csv(g: &MetricGraph, p: &CurvatureProfile, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "sphere", "frontier", "k", "k_comb", "k_d"])?;
    for v in g.vertices() {
        w.write_record([
            v.id.to_string(),
            v.sphere.to_string(),
            v.frontier.to_string(),
            fmt_curv(p.k[v.id]),
            fmt_curv(p.k_comb[v.id]),
            fmt_curv(p.k_d[v.id]),
        ])?;
    }
    w.flush()?;
    Ok(())
}
