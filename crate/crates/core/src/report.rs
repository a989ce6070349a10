//! One report per graph: every bound, every computed eigenvalue, and the
//! orderings between them.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bounds::{real, Bound, Side, Target, Verdict};
use crate::curvature::{self, CurvatureProfile};
use crate::error::{Error, Result};
use crate::fit;
use crate::generators::FamilySpec;
use crate::graph::{MetricGraph, SaVerdict};
use crate::isoperimetry::{self, IsoKind, IsoReport, Witness};
use crate::linalg::EigenOptions;
use crate::spectra::{self, Mode, SpectralResult};
use crate::volume::{self, GrowthModel, Point};

pub const REPORT_FORMAT: &str = "bounds-report/1";

pub const HEADER: &str = "enumerated isoperimetric values are minima over finitely many subgraphs, \
hence upper estimates of the constants: they appear only as ceilings and witnesses. \
Certified Cheeger floors come from curvature.";

/// Largest admissible |λ(discrete) − (1 − cos √λ(quantum))| on equilateral graphs.
pub const TRANSFER_TOL: f64 = 1e-3;

/// Values below this count as zero in trend conclusions.
pub const TREND_ZERO_TOL: f64 = 1e-3;

/// Relative slack for comparisons between extrapolated essential quantities.
pub const ESS_TREND_TOL: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// Largest enumerated subgraph (edges) or vertex set.
    pub iso_cap: usize,
    /// Essential sequences run over k = 0..=k_max.
    pub k_max: usize,
    pub enumeration: bool,
    pub enumeration_budget: u64,
    pub spectra: bool,
    /// Spectra are skipped above this many edges.
    pub max_spectral_edges: usize,
    /// FEM mesh size; defaults to a twentieth of the shortest edge.
    pub mesh: Option<f64>,
    pub eigen_tol: f64,
    pub volume: bool,
    /// Probe radius for the uniform growth rate μ_*; `None` skips it.
    pub r_probe: Option<f64>,
    pub sample_budget: u64,
    /// Family of the graph, for the total volume and depth histories.
    pub family: Option<FamilySpec>,
    pub history_depths: Vec<usize>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            iso_cap: 8,
            k_max: 3,
            enumeration: true,
            enumeration_budget: 20_000_000,
            spectra: true,
            max_spectral_edges: 300_000,
            mesh: None,
            eigen_tol: 1e-8,
            volume: true,
            r_probe: None,
            sample_budget: 20_000_000,
            family: None,
            history_depths: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub vertices: usize,
    pub edges: usize,
    pub depth: usize,
    pub root: usize,
    pub frontier: usize,
    pub total_length: f64,
    pub equilateral: bool,
    pub ell_star_lower: f64,
    pub ell_star_upper: f64,
    /// mes of the infinite graph when finite and known.
    #[serde(with = "real::opt")]
    pub total_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoSummary {
    pub kind: IsoKind,
    #[serde(with = "real")]
    pub value_upper: f64,
    /// Edge ids for the metric constant, vertex ids otherwise.
    pub witness_ids: Vec<usize>,
    #[serde(with = "real::seq")]
    pub essential_seq: Vec<(usize, f64)>,
    pub cap: usize,
    pub examined: u64,
}

impl From<&IsoReport> for IsoSummary {
    fn from(r: &IsoReport) -> Self {
        let witness_ids = match &r.witness {
            Witness::Subgraph(w) => w.edge_ids.clone(),
            Witness::Vertices(w) => w.vertex_ids.clone(),
        };
        IsoSummary {
            kind: r.kind,
            value_upper: r.value_upper,
            witness_ids,
            essential_seq: r.essential_seq.clone(),
            cap: r.enumeration_cap,
            examined: r.examined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    #[serde(with = "real")]
    pub inf_k: f64,
    #[serde(with = "real")]
    pub inf_k_comb: f64,
    #[serde(with = "real")]
    pub inf_k_d: f64,
    /// Extrapolated limits of the per-sphere minima.
    #[serde(with = "real")]
    pub k_ess_limit: f64,
    #[serde(with = "real")]
    pub k_comb_ess_limit: f64,
    #[serde(with = "real")]
    pub k_d_ess_limit: f64,
    #[serde(with = "real::seq")]
    pub k_ess_seq: Vec<(usize, f64)>,
    #[serde(with = "real::seq")]
    pub k_comb_ess_seq: Vec<(usize, f64)>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSummary {
    pub center: String,
    pub estimate: f64,
    pub growth: GrowthModel,
    pub tail_fit: (f64, f64),
    #[serde(with = "real")]
    pub valid_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuStarSummary {
    pub r_probe: f64,
    /// log vol_*(r)/r at the largest probed radius.
    pub estimate: f64,
    #[serde(with = "real::opt")]
    pub min_ratio: Option<f64>,
    pub min_center: Option<String>,
    pub sampled: usize,
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    pub lambda_quantum: f64,
    pub predicted_discrete: f64,
    pub lambda_discrete: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Computed {
    pub quantum: Option<SpectralResult>,
    pub discrete: Option<SpectralResult>,
    /// Histories over `history_depths`; the result fields hold the deepest truncation.
    pub quantum_history: Option<SpectralResult>,
    pub discrete_history: Option<SpectralResult>,
    /// Relative slack for comparing the FEM value with ceilings: λh²/6.
    pub fem_slack: f64,
    /// Relative slack from the eigensolver tolerance.
    pub eigen_slack: f64,
    pub transfer: Option<TransferCheck>,
    pub isoperimetry: Vec<IsoSummary>,
    /// Linking inequalities re-evaluated on the graph at build time.
    pub connection_checks: Vec<Verdict>,
    pub curvature: CurvatureSummary,
    pub volume: Option<VolumeSummary>,
    pub mu_star: Option<MuStarSummary>,
    pub selfadjointness: Vec<SaVerdict>,
    pub selfadjointness_label: String,
    /// Parts not computed, with the reason.
    pub skipped: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialSection {
    pub lower_bounds: Vec<Bound>,
    pub upper_bounds: Vec<Bound>,
    #[serde(with = "real::seq")]
    pub ell_ess_upper_seq: Vec<(usize, f64)>,
    #[serde(with = "real::seq")]
    pub ell_ess_lower_seq: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    #[serde(with = "real::seq")]
    pub lambda0_history: Vec<(usize, f64)>,
    pub history_decreasing: bool,
    pub history_loglog_slope: Option<f64>,
    /// Largest λ₀ floor with curvature infima replaced by their extrapolated limits.
    pub lambda0_floor_limit: f64,
    pub ess_floor: f64,
    #[serde(with = "real")]
    pub ess_ceiling: f64,
    pub lambda0_zero: bool,
    pub ess_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub format: String,
    pub header: String,
    pub graph: GraphMeta,
    pub config: ReportConfig,
    pub lower_bounds: Vec<Bound>,
    pub upper_bounds: Vec<Bound>,
    pub computed: Computed,
    pub essential_section: EssentialSection,
    pub trend: Trend,
    pub verdicts: Vec<Verdict>,
    /// Agreement of tail extrapolations; informative, not part of [`BoundsReport::all_pass`].
    pub consistency: Vec<Verdict>,
}

impl BoundsReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn failures(&self) -> Vec<&Verdict> {
        self.verdicts.iter().filter(|v| !v.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: BoundsReport = serde_json::from_str(text)?;
        if r.format != REPORT_FORMAT {
            return Err(Error::Format(format!("expected format {REPORT_FORMAT}, found {}", r.format)));
        }
        Ok(r)
    }

    pub fn bound(&self, name: &str) -> Option<&Bound> {
        self.lower_bounds
            .iter()
            .chain(&self.upper_bounds)
            .chain(&self.essential_section.lower_bounds)
            .chain(&self.essential_section.upper_bounds)
            .find(|b| b.name == name)
    }

    pub fn iso(&self, kind: IsoKind) -> Option<&IsoSummary> {
        self.computed.isoperimetry.iter().find(|s| s.kind == kind)
    }
}

fn skippable(e: &Error) -> bool {
    matches!(e, Error::Resource { .. } | Error::EmptyRange(_))
}

/// `Ok(None)` with a note for budget and range failures, other errors pass through.
fn soften<T>(r: Result<T>, what: &str, skipped: &mut Vec<String>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(e) if skippable(&e) => {
            skipped.push(format!("{what}: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn sphere_minima(g: &MetricGraph, vals: &[f64]) -> Vec<(usize, f64)> {
    let mut mins = vec![f64::INFINITY; g.max_sphere() + 1];
    for v in g.vertices().iter().filter(|v| !v.frontier) {
        mins[v.sphere] = mins[v.sphere].min(vals[v.id]);
    }
    mins.into_iter().enumerate().filter(|(_, x)| *x < f64::INFINITY).collect()
}

/// The truncation infimum, or the extrapolated limit of the per-sphere minima when smaller.
fn limit_inf(inf: f64, minima: &[(usize, f64)]) -> f64 {
    let lim = curvature::extrapolate(minima).value;
    if lim.is_finite() { inf.min(lim) } else { inf }
}

fn max_applicable(bounds: &[Bound], target: Target) -> f64 {
    bounds
        .iter()
        .filter(|b| b.applicable && b.target == target)
        .map(|b| b.value)
        .fold(0.0, f64::max)
}

fn min_applicable(bounds: &[Bound], target: Target) -> f64 {
    bounds
        .iter()
        .filter(|b| b.applicable && b.target == target)
        .map(|b| b.value)
        .fold(f64::INFINITY, f64::min)
}

/// Test functions supported on single edges: (π/|e|)², or (π/2|e|)² on
/// edges ending at a Neumann loose end.
fn edge_test_ceilings(g: &MetricGraph) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let ell = g.edges().iter().map(|e| e.length).fold(0.0, f64::max);
    let refined = g
        .edges()
        .iter()
        .map(|e| {
            let neumann_end = [e.source, e.target]
                .iter()
                .any(|&v| g.is_neumann(v) && g.vertices()[v].ambient_degree == 1);
            if neumann_end {
                (pi / (2.0 * e.length)).powi(2)
            } else {
                (pi / e.length).powi(2)
            }
        })
        .fold(f64::INFINITY, f64::min);
    ((pi / ell).powi(2), refined)
}

struct Parts {
    iso: Option<Vec<IsoReport>>,
    quantum: Option<SpectralResult>,
    discrete: Option<SpectralResult>,
    histories: Option<(SpectralResult, SpectralResult)>,
    mu: Option<volume::MuEstimate>,
    mu_star: Option<volume::MuStarEstimate>,
    skipped: Vec<String>,
}

fn compute_parts(g: &MetricGraph, config: &ReportConfig, h: f64, opts: &EigenOptions) -> Result<Parts> {
    let mut skipped = Vec::new();
    let spectra_on = config.spectra && g.num_edges() <= config.max_spectral_edges;
    if config.spectra && !spectra_on {
        skipped.push(format!(
            "spectra: {} edges exceed max_spectral_edges {}",
            g.num_edges(),
            config.max_spectral_edges
        ));
    }

    let enumerate = || -> Result<Option<Vec<IsoReport>>> {
        if !config.enumeration {
            return Ok(None);
        }
        let k_max = config.k_max.min(g.max_sphere());
        isoperimetry::essential_iso_sequences_budget(g, k_max, config.iso_cap, config.enumeration_budget).map(Some)
    };
    let spectra = || -> Result<(Option<SpectralResult>, Option<SpectralResult>)> {
        if !spectra_on {
            return Ok((None, None));
        }
        let (q, d) = rayon::join(|| spectra::lambda0_quantum(g, h, opts), || spectra::lambda0_discrete(g, opts));
        Ok((Some(q?), Some(d?)))
    };
    let histories = || -> Result<Option<(SpectralResult, SpectralResult)>> {
        match &config.family {
            Some(fam) if spectra_on && !config.history_depths.is_empty() => {
                let d = &config.history_depths;
                let (q, dd) = rayon::join(
                    || spectra::lambda0_sequence(fam, d, Mode::Quantum, Some(h), opts),
                    || spectra::lambda0_sequence(fam, d, Mode::Discrete, None, opts),
                );
                Ok(Some((q?, dd?)))
            }
            _ => Ok(None),
        }
    };
    let growth = || -> (Option<Result<volume::MuEstimate>>, Option<Result<volume::MuStarEstimate>>) {
        let mu = config.volume.then(|| volume::mu_estimate(g, &Point::Vertex { id: g.root() }));
        let star = config.r_probe.map(|r| {
            let centers = volume::sample_centers(g);
            volume::mu_star_estimate(g, &centers, r, config.sample_budget)
        });
        (mu, star)
    };

    let ((iso, sp), (hist, (mu, star))) =
        rayon::join(|| rayon::join(enumerate, spectra), || rayon::join(histories, growth));
    let iso = soften(iso, "enumeration", &mut skipped)?.flatten();
    let (quantum, discrete) = sp?;
    let histories = hist?;
    let mu = match mu {
        Some(r) => soften(r, "volume growth", &mut skipped)?,
        None => None,
    };
    let mu_star = match star {
        Some(r) => soften(r, "uniform volume growth", &mut skipped)?,
        None => None,
    };
    Ok(Parts { iso, quantum, discrete, histories, mu, mu_star, skipped })
}

/// Runs every module on `g` and assembles bounds, computed values and verdicts.
pub fn build_report(g: &MetricGraph, config: &ReportConfig) -> Result<BoundsReport> {
    let pi2 = std::f64::consts::PI.powi(2);
    let opts = EigenOptions { tol: config.eigen_tol, ..EigenOptions::default() };
    let h = config.mesh.unwrap_or_else(|| spectra::default_mesh(g));
    let depth = g.max_sphere();
    let radii: Vec<usize> = (0..depth).collect();
    let extremes = g.length_extremes(&radii)?;
    let profile = curvature::curvature_profile(g);
    let sa = g.selfadjointness_diagnostics();
    let total_volume = config.family.as_ref().and_then(|f| f.total_volume());

    let parts = compute_parts(g, config, h, &opts)?;

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut ess_lower = Vec::new();
    let mut ess_upper = Vec::new();
    for b in curvature::curvature_alpha_bounds(&profile, &extremes) {
        match b.target {
            Target::AlphaEss | Target::Lambda0Ess => ess_lower.push(b),
            _ => lower.push(b),
        }
    }
    if let Some(mes) = total_volume {
        lower.push(Bound::new(
            "alpha_finite_volume",
            Target::Alpha,
            Side::Lower,
            1.0 / mes,
            "finite volume: alpha >= 1/mes(G)",
        ));
        lower.push(Bound::new(
            "lambda0_finite_volume",
            Target::Lambda0,
            Side::Lower,
            1.0 / (4.0 * mes * mes),
            "cheeger with finite volume: lambda0 >= 1/(4 mes(G)^2)",
        ));
    }

    let (longest, refined) = edge_test_ceilings(g);
    upper.push(Bound::new(
        "lambda0_longest_edge",
        Target::Lambda0,
        Side::Upper,
        longest,
        "edge test function: lambda0 <= pi^2/ell*^2",
    ));
    upper.push(Bound::new(
        "lambda0_edge_refined",
        Target::Lambda0,
        Side::Upper,
        refined,
        "edge test functions: lambda0 <= min((pi/|e|)^2, (pi/(2|e|))^2 at neumann loose ends)",
    ));

    let ell_lo = extremes.ell_star_lower;
    if let Some(iso) = &parts.iso {
        for r in iso {
            let (name, target, source) = match r.kind {
                IsoKind::AlphaMetric => ("alpha_enumerated", Target::Alpha, "enumerated subgraph ratio: alpha <= deg(boundary)/mes"),
                IsoKind::AlphaD => ("alpha_d_enumerated", Target::AlphaD, "enumerated vertex set ratio: alpha_d <= #E_b/m"),
                _ => continue,
            };
            upper.push(
                Bound::new(name, target, Side::Upper, r.value_upper, source)
                    .noted(&format!("ceiling on the cheeger floor: alpha^2/4 <= {:e}", r.value_upper.powi(2) / 4.0)),
            );
        }
        if let Some(r) = iso.iter().find(|r| r.kind == IsoKind::AlphaMetric) {
            upper.push(
                Bound::new(
                    "lambda0_buser",
                    Target::Lambda0,
                    Side::Upper,
                    pi2 * r.value_upper / (2.0 * ell_lo),
                    "buser-type: lambda0 <= pi^2 alpha/(2 ell_*) on the enumerated witness",
                )
                .gated(ell_lo > 0.0, "ell_* is zero"),
            );
        }
    }
    if let Some(d) = &parts.discrete {
        upper.push(Bound::new(
            "lambda0_six_discrete",
            Target::Lambda0,
            Side::Upper,
            6.0 * d.lambda0,
            "piecewise linear test functions: lambda0 <= 6 lambda0(discrete)",
        ));
    }

    let ell_ess = if extremes.ell_ess_upper_seq.is_empty() {
        extremes.ell_star_upper
    } else {
        curvature::extrapolate(&extremes.ell_ess_upper_seq).value
    };
    ess_upper.push(
        Bound::new(
            "lambda0_ess_longest_edge",
            Target::Lambda0Ess,
            Side::Upper,
            if ell_ess > 1e-12 { pi2 / (ell_ess * ell_ess) } else { f64::INFINITY },
            "edge test functions at infinity: lambda0_ess <= pi^2/ell*_ess^2",
        )
        .noted(curvature::ESS_LABEL),
    );
    if let Some(mu) = &parts.mu {
        let star = parts.mu_star.as_ref().and_then(|s| s.sequence.last().map(|p| p.1.max(0.0)));
        ess_upper.extend(volume::brooks_upper(mu.estimate, star, &sa));
    }

    let computed_curv = {
        let lim_k = limit_inf(profile.inf_k, &profile.k_sphere_min);
        let lim_comb = limit_inf(profile.inf_k_comb, &profile.k_comb_sphere_min);
        let lim_d = limit_inf(profile.inf_k_d, &sphere_minima(g, &profile.k_d));
        let ess = curvature::essential_curvature_limits(&profile);
        (
            CurvatureSummary {
                inf_k: profile.inf_k,
                inf_k_comb: profile.inf_k_comb,
                inf_k_d: profile.inf_k_d,
                k_ess_limit: ess.k_ess.value,
                k_comb_ess_limit: ess.k_comb_ess.value,
                k_d_ess_limit: curvature::extrapolate(&sphere_minima(g, &profile.k_d)).value,
                k_ess_seq: profile.k_ess_seq.clone(),
                k_comb_ess_seq: profile.k_comb_ess_seq.clone(),
                label: profile.label.clone(),
            },
            (lim_k, lim_comb, lim_d),
        )
    };
    let (curv_summary, (lim_k, lim_comb, lim_d)) = computed_curv;

    let floor_limit = {
        let limited = CurvatureProfile { inf_k: lim_k, inf_k_comb: lim_comb, inf_k_d: lim_d, ..profile.clone() };
        let mut b = curvature::curvature_alpha_bounds(&limited, &extremes);
        b.extend(lower.iter().filter(|b| b.name == "lambda0_finite_volume").cloned());
        max_applicable(&b, Target::Lambda0)
    };

    let quantum_history = parts.histories.as_ref().map(|h| h.0.clone());
    let discrete_history = parts.histories.as_ref().map(|h| h.1.clone());
    let history = quantum_history.as_ref().map(|r| r.monotone_history.clone()).unwrap_or_default();
    let history_decreasing = history.len() >= 2
        && quantum_history.as_ref().and_then(|r| r.monotone).unwrap_or(false)
        && history.last().unwrap().1 < history[0].1;
    let history_loglog_slope = if history.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = history.iter().map(|&(d, l)| (d as f64, l)).unzip();
        fit::loglog_slope(&xs, &ys)
    } else {
        None
    };
    let ess_floor = max_applicable(&ess_lower, Target::Lambda0Ess);
    let ess_ceiling = min_applicable(&ess_upper, Target::Lambda0Ess);
    let ess_zero = ess_ceiling <= TREND_ZERO_TOL;
    let lambda0_zero = ess_zero
        && floor_limit <= TREND_ZERO_TOL
        && (history.is_empty() || history_decreasing);
    let trend = Trend {
        lambda0_history: history,
        history_decreasing,
        history_loglog_slope,
        lambda0_floor_limit: floor_limit,
        ess_floor,
        ess_ceiling,
        lambda0_zero,
        ess_zero,
    };

    let transfer = match (&parts.quantum, &parts.discrete) {
        (Some(q), Some(d)) if g.is_equilateral() => spectra::equilateral_transfer(q.lambda0).ok().map(|p| TransferCheck {
            lambda_quantum: q.lambda0,
            predicted_discrete: p,
            lambda_discrete: d.lambda0,
            gap: (p - d.lambda0).abs(),
        }),
        _ => None,
    };
    let connection_checks = match &parts.iso {
        Some(iso) => isoperimetry::check_connection_inequalities(g, iso, Some(&profile))?,
        None => Vec::new(),
    };
    let fem_slack = parts.quantum.as_ref().map_or(0.0, |q| q.lambda0 * h * h / 6.0);

    let mut report = BoundsReport {
        format: REPORT_FORMAT.to_string(),
        header: HEADER.to_string(),
        graph: GraphMeta {
            vertices: g.num_vertices(),
            edges: g.num_edges(),
            depth,
            root: g.root(),
            frontier: g.vertices().iter().filter(|v| v.frontier).count(),
            total_length: g.total_length(),
            equilateral: g.is_equilateral(),
            ell_star_lower: extremes.ell_star_lower,
            ell_star_upper: extremes.ell_star_upper,
            total_volume,
        },
        config: config.clone(),
        lower_bounds: lower,
        upper_bounds: upper,
        computed: Computed {
            quantum: parts.quantum,
            discrete: parts.discrete,
            quantum_history,
            discrete_history,
            fem_slack,
            eigen_slack: 10.0 * config.eigen_tol,
            transfer,
            isoperimetry: parts.iso.iter().flatten().map(IsoSummary::from).collect(),
            connection_checks,
            curvature: curv_summary,
            volume: parts.mu.map(|m| VolumeSummary {
                center: m.center.to_string(),
                estimate: m.estimate,
                growth: m.growth,
                tail_fit: m.tail_fit,
                valid_radius: m.valid_radius,
            }),
            mu_star: parts.mu_star.map(|s| MuStarSummary {
                r_probe: s.r_probe,
                estimate: s.sequence.last().map_or(f64::NAN, |p| p.1),
                min_ratio: s.min_ratio.as_ref().map(|m| m.ratio),
                min_center: s.min_ratio.as_ref().map(|m| m.center.to_string()),
                sampled: s.sampled,
                partial: s.partial,
            }),
            selfadjointness: sa.verdicts.clone(),
            selfadjointness_label: sa.label.clone(),
            skipped: parts.skipped,
        },
        essential_section: EssentialSection {
            lower_bounds: ess_lower,
            upper_bounds: ess_upper,
            ell_ess_upper_seq: extremes.ell_ess_upper_seq,
            ell_ess_lower_seq: extremes.ell_ess_lower_seq,
        },
        trend,
        verdicts: Vec::new(),
        consistency: Vec::new(),
    };
    report.verdicts = verify_orderings(&report);
    report.consistency = check_consistency(&report);
    Ok(report)
}

/// Every ordering the bounds promise, evaluated on the stored values only.
pub fn verify_orderings(r: &BoundsReport) -> Vec<Verdict> {
    let mut out = Vec::new();
    let c = &r.computed;
    let eig = c.eigen_slack;
    let lam_q = c.quantum.as_ref().map(|q| q.lambda0);
    let lam_d = c.discrete.as_ref().map(|d| d.lambda0);
    let applicable = |bs: &[Bound]| bs.iter().filter(|b| b.applicable).cloned().collect::<Vec<_>>();
    let lower = applicable(&r.lower_bounds);
    let upper = applicable(&r.upper_bounds);

    for b in &lower {
        match b.target {
            Target::Lambda0 => {
                if let Some(l) = lam_q {
                    out.push(Verdict::le_within(&format!("{} <= lambda0 (truncation)", b.name), b.value, l, eig));
                }
            }
            Target::Lambda0Discrete => {
                if let Some(l) = lam_d {
                    out.push(Verdict::le_within(&format!("{} <= lambda0 discrete (truncation)", b.name), b.value, l, eig));
                }
            }
            Target::Alpha | Target::AlphaD => {
                for u in upper.iter().filter(|u| u.target == b.target) {
                    out.push(Verdict::le(&format!("{} <= {}", b.name, u.name), b.value, u.value));
                }
            }
            _ => {}
        }
    }
    if let Some(l) = lam_q {
        for u in upper.iter().filter(|u| u.target == Target::Lambda0 && u.name != "lambda0_six_discrete") {
            out.push(Verdict::le_within(
                &format!("lambda0 (truncation) <= {}", u.name),
                l,
                u.value,
                c.fem_slack + eig,
            ));
        }
    }
    if let (Some(q), Some(d)) = (lam_q, lam_d) {
        out.push(Verdict::le_within("lambda0 quantum <= 6 lambda0 discrete", q, 6.0 * d, eig));
    }
    if let (Some(q), Some(d), true) = (lam_q, lam_d, r.graph.equilateral) {
        let predicted = if (0.0..=std::f64::consts::PI.powi(2)).contains(&q) { 1.0 - q.sqrt().cos() } else { f64::NAN };
        let gap = (predicted - d).abs();
        out.push(Verdict::le("equilateral transfer gap", if gap.is_nan() { f64::INFINITY } else { gap }, TRANSFER_TOL));
    }
    for h in [&c.quantum_history, &c.discrete_history].into_iter().flatten() {
        out.push(Verdict::check(&format!("{:?} history nonincreasing in depth", h.mode), h.monotone == Some(true)));
    }

    out
}

/// `lhs <= rhs` up to [`ESS_TREND_TOL`] relative or [`TREND_ZERO_TOL`] absolute slack.
fn trend_le(name: &str, lhs: f64, rhs: f64) -> Verdict {
    let mut v = Verdict::le_within(name, lhs, rhs, ESS_TREND_TOL);
    v.pass |= lhs <= rhs + TREND_ZERO_TOL;
    v
}

/// Comparisons between values extrapolated from the truncation's tail:
/// essential floors against essential ceilings, the limiting λ₀ floor
/// against essential ceilings (λ₀ ≤ λ₀^ess), and the zero trend.
pub fn check_consistency(r: &BoundsReport) -> Vec<Verdict> {
    let mut out = Vec::new();
    let ess = |bs: &[Bound]| -> Vec<Bound> {
        bs.iter().filter(|b| b.applicable && b.target == Target::Lambda0Ess).cloned().collect()
    };
    let ess_lower = ess(&r.essential_section.lower_bounds);
    let ess_upper = ess(&r.essential_section.upper_bounds);
    let t = &r.trend;
    for u in &ess_upper {
        out.push(trend_le(&format!("lambda0 floor limit <= {}", u.name), t.lambda0_floor_limit, u.value));
    }
    for l in &ess_lower {
        for u in &ess_upper {
            out.push(trend_le(&format!("{} <= {}", l.name, u.name), l.value, u.value));
        }
    }
    if r.graph.total_volume.is_none() {
        let consistent = t.lambda0_zero == t.ess_zero && !(t.lambda0_zero && t.ess_floor > TREND_ZERO_TOL);
        out.push(Verdict::check("lambda0 = 0 iff lambda0_ess = 0 (trend)", consistent));
    }
    out
}

/// `kind,k,value` rows of the enumerated essential sequences.
pub fn write_essential_csv(r: &BoundsReport, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "k", "value"])?;
    for s in &r.computed.isoperimetry {
        let kind = serde_json::to_value(s.kind)?;
        let kind = kind.as_str().unwrap_or_default().to_string();
        for &(k, v) in &s.essential_seq {
            w.write_record([kind.clone(), k.to_string(), format!("{v:.17e}")])?;
        }
    }
    for (k, v) in &r.essential_section.ell_ess_upper_seq {
        w.write_record(["ell_star_ess".to_string(), k.to_string(), format!("{v:.17e}")])?;
    }
    for (k, v) in &r.computed.curvature.k_ess_seq {
        w.write_record(["k_ess".to_string(), k.to_string(), format!("{v:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}
