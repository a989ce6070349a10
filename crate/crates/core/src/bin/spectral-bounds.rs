use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use spectral_bounds::bounds::Verdict;
use spectral_bounds::discrete_cheeger::{self, WeightedGraph, WGRAPH_FORMAT};
use spectral_bounds::generators::{self, SparseTreeOptions};
use spectral_bounds::linalg::EigenOptions;
use spectral_bounds::report::{self, BoundsReport, ReportConfig};
use spectral_bounds::spectra::{self, Mode};
use spectral_bounds::volume::{self, Point};
use spectral_bounds::{curvature, io as mgraph, isoperimetry, Error, MetricGraph, Result};

#[derive(Parser)]
#[command(name = "spectral-bounds", version, about = "Spectral bounds for metric graphs and their truncations")]
struct Cli {
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Bethe,
    Antitree,
    SparseTree,
    Lattice,
    /// Random weighted graph with intrinsic d (wgraph/1).
    RandomWeighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Quantum,
    Discrete,
}

#[derive(Subcommand)]
enum Command {
    /// Write a truncated family member as mgraph/1 (or wgraph/1).
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 3)]
        beta: usize,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 6)]
        radius: usize,
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        /// Vertex count for random-weighted.
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Curvature and isoperimetric bounds with witnesses.
    Bounds {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        cap: usize,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        /// Per-vertex curvature table.
        #[arg(long)]
        dump_curvature: Option<PathBuf>,
    },
    /// λ₀ of the truncation.
    Spectrum {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "quantum")]
        mode: ModeArg,
        #[arg(long)]
        mesh: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Write PREFIX.stiffness.coo and PREFIX.mass.coo.
        #[arg(long)]
        export_matrices: Option<PathBuf>,
    },
    /// Ball volumes and the growth rate around a center.
    Volume {
        file: PathBuf,
        /// root, vertex:ID or edge:ID:OFFSET
        #[arg(long, default_value = "root")]
        center: String,
    },
    /// Full report with verdicts; exit code 2 when a verdict fails.
    Report {
        file: PathBuf,
        /// ReportConfig as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        mesh: Option<f64>,
    },
    /// Re-evaluate the verdicts of a stored report.
    Verify { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json(out: &Option<PathBuf>, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(out, s.as_bytes())
}

enum Input {
    Metric(MetricGraph),
    Weighted(WeightedGraph),
}

fn load(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    match v.get("format").and_then(|f| f.as_str()) {
        Some(mgraph::MGRAPH_FORMAT) => Ok(Input::Metric(mgraph::from_mgraph_str(&text)?)),
        Some(WGRAPH_FORMAT) => Ok(Input::Weighted(WeightedGraph::from_json(&text)?)),
        other => Err(Error::Format(format!("unknown graph format {other:?}"))),
    }
}

fn load_metric(path: &Path) -> Result<MetricGraph> {
    match load(path)? {
        Input::Metric(g) => Ok(g),
        Input::Weighted(_) => Err(Error::Format(format!("{} is a weighted graph; a metric graph is needed", path.display()))),
    }
}

fn print_verdicts(verdicts: &[Verdict]) {
    for v in verdicts.iter().filter(|v| !v.pass) {
        eprintln!("FAIL {}: {} vs {}", v.name, v.lhs, v.rhs);
    }
}

fn print_consistency(checks: &[Verdict]) {
    for v in checks.iter().filter(|v| !v.pass) {
        eprintln!("note: tail estimates disagree, {}: {} vs {}", v.name, v.lhs, v.rhs);
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let out = &cli.out;
    match &cli.command {
        Command::Generate { family, beta, q, s, depth, dim, radius, length, n } => {
            let g = match family {
                Family::Bethe => generators::bethe(*beta, *depth)?,
                Family::Antitree => generators::antitree(*q, *s, *depth)?,
                Family::SparseTree => generators::sparse_tree(*depth, SparseTreeOptions::default())?,
                Family::Lattice => generators::lattice(*dim, *radius, *length)?,
                Family::RandomWeighted => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let w = discrete_cheeger::random_intrinsic(&mut rng, *n)?;
                    emit(out, w.to_json().as_bytes())?;
                    return Ok(true);
                }
            };
            emit(out, mgraph::to_mgraph_string(&g).as_bytes())?;
            Ok(true)
        }
        Command::Bounds { file, cap, kmax, dump_curvature } => match load(file)? {
            Input::Metric(g) => {
                let profile = curvature::curvature_profile(&g);
                let radii: Vec<usize> = (0..g.max_sphere()).collect();
                let extremes = g.length_extremes(&radii)?;
                let bounds = curvature::curvature_alpha_bounds(&profile, &extremes);
                if let Some(p) = dump_curvature {
                    curvature::write_csv(&g, &profile, fs::File::create(p)?)?;
                }
                let iso = isoperimetry::essential_iso_sequences(&g, (*kmax).min(g.max_sphere()), *cap)?;
                let checks = isoperimetry::check_connection_inequalities(&g, &iso, Some(&profile))?;
                let pass = checks.iter().all(|v| v.pass);
                print_verdicts(&checks);
                if cli.format == Some(Format::Csv) {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["kind", "k", "value"])?;
                    for r in &iso {
                        let kind = serde_json::to_value(r.kind)?;
                        for (k, v) in &r.essential_seq {
                            w.write_record([kind.as_str().unwrap_or_default(), &k.to_string(), &format!("{v:.17e}")])?;
                        }
                    }
                    emit(out, &w.into_inner().map_err(|e| Error::Io(e.into_error()))?)?;
                } else {
                    emit_json(
                        out,
                        &json!({
                            "format": "bounds/1",
                            "header": report::HEADER,
                            "curvature_bounds": bounds,
                            "essential_curvature": curvature::essential_curvature_limits(&profile),
                            "isoperimetry": iso,
                            "connection_checks": checks,
                        }),
                    )?;
                }
                Ok(pass)
            }
            Input::Weighted(w) => {
                let check = discrete_cheeger::is_intrinsic(&w)?;
                let lambda = w.lambda0(&EigenOptions::default())?;
                let cheeger = if check.intrinsic { Some(discrete_cheeger::cheeger_lower_discrete(&w, *cap, None)?) } else { None };
                let verdicts: Vec<Verdict> = cheeger
                    .iter()
                    .filter(|c| c.exact)
                    .map(|c| Verdict::le("alpha^2/2 <= lambda0", c.bound, lambda.lambda))
                    .collect();
                print_verdicts(&verdicts);
                emit_json(
                    out,
                    &json!({
                        "format": "bounds/1",
                        "intrinsic": check,
                        "cheeger": cheeger,
                        "lambda0": lambda,
                        "verdicts": verdicts,
                    }),
                )?;
                Ok(verdicts.iter().all(|v| v.pass))
            }
        },
        Command::Spectrum { file, mode, mesh, tol, export_matrices } => {
            let opts = EigenOptions { tol: *tol, ..EigenOptions::default() };
            let (a, b, result) = match (load(file)?, mode) {
                (Input::Metric(g), ModeArg::Quantum) => {
                    let h = mesh.unwrap_or_else(|| spectra::default_mesh(&g));
                    let sys = spectra::assemble_quantum_fem(&g, h)?;
                    let r = spectra::lambda0(&g, Mode::Quantum, Some(h), &opts)?;
                    (sys.stiffness, sys.mass, serde_json::to_value(r)?)
                }
                (Input::Metric(g), ModeArg::Discrete) => {
                    let sys = spectra::assemble_discrete(&g)?;
                    let r = spectra::lambda0(&g, Mode::Discrete, None, &opts)?;
                    (sys.stiffness, sys.mass, serde_json::to_value(r)?)
                }
                (Input::Weighted(w), ModeArg::Discrete) => {
                    let (a, b, _) = w.operator()?;
                    let r = w.lambda0(&opts)?;
                    (a, b, serde_json::to_value(r)?)
                }
                (Input::Weighted(_), ModeArg::Quantum) => {
                    return Err(Error::Parameter("weighted graphs have no quantum mode".into()))
                }
            };
            if let Some(prefix) = export_matrices {
                let name = |ext: &str| {
                    let mut p = prefix.clone().into_os_string();
                    p.push(ext);
                    PathBuf::from(p)
                };
                a.write_coo(io::BufWriter::new(fs::File::create(name(".stiffness.coo"))?))?;
                b.write_coo(io::BufWriter::new(fs::File::create(name(".mass.coo"))?))?;
            }
            emit_json(out, &result)?;
            Ok(true)
        }
        Command::Volume { file, center } => {
            let g = load_metric(file)?;
            let center = if center == "root" { Point::Vertex { id: g.root() } } else { center.parse()? };
            let mu = volume::mu_estimate(&g, &center)?;
            let radii: Vec<f64> = mu.sequence.iter().map(|p| p.0).collect();
            let table = volume::volume_table(&g, &center, &radii)?;
            if cli.format == Some(Format::Json) {
                emit_json(out, &json!({ "table": table, "mu": mu }))?;
            } else {
                let mut buf = Vec::new();
                volume::write_csv(&table, &mut buf)?;
                emit(out, &buf)?;
            }
            Ok(true)
        }
        Command::Report { file, config, cap, kmax, mesh } => {
            let g = load_metric(file)?;
            let mut cfg: ReportConfig = match config {
                Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
                None => ReportConfig::default(),
            };
            if let Some(c) = cap {
                cfg.iso_cap = *c;
            }
            if let Some(k) = kmax {
                cfg.k_max = *k;
            }
            if mesh.is_some() {
                cfg.mesh = *mesh;
            }
            let r = report::build_report(&g, &cfg)?;
            print_verdicts(&r.verdicts);
            print_consistency(&r.consistency);
            if cli.format == Some(Format::Csv) {
                let mut buf = Vec::new();
                report::write_essential_csv(&r, &mut buf)?;
                emit(out, &buf)?;
            } else {
                emit(out, r.to_json()?.as_bytes())?;
            }
            Ok(r.all_pass())
        }
        Command::Verify { file } => {
            let r = BoundsReport::from_json(&fs::read_to_string(file)?)?;
            let verdicts = report::verify_orderings(&r);
            let consistency = report::check_consistency(&r);
            let reproduced = verdicts == r.verdicts && consistency == r.consistency;
            if !reproduced {
                eprintln!("stored verdicts differ from the recomputed ones");
            }
            print_verdicts(&verdicts);
            print_consistency(&consistency);
            emit_json(
                out,
                &json!({ "reproduced": reproduced, "verdicts": verdicts, "consistency": consistency }),
            )?;
            Ok(reproduced && verdicts.iter().all(|v| v.pass))
        }
    }
}
