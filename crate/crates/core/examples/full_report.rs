//! Full bounds report for a family member: every lower and upper bound,
//! the computed spectra and the ordering verdicts. Writes the JSON report
//! when a path is given.
//!
//!     cargo run --release --example full_report -- [depth] [out.json]

use spectral_bounds::report::{build_report, ReportConfig};
use spectral_bounds::FamilySpec;

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1);
    let depth: usize = args.next().map_or(6, |s| s.parse().expect("depth"));
    let out = args.next();

    let spec = FamilySpec::Antitree { q: 2, s: 1.0, depth };
    let config = ReportConfig { iso_cap: 6, k_max: 2, family: Some(spec.clone()), ..ReportConfig::default() };
    let r = build_report(&spec.generate()?, &config)?;

    println!("{}", r.header);
    for b in r.lower_bounds.iter().chain(&r.upper_bounds).filter(|b| b.applicable) {
        println!("{:<34} {:?} {:?} {:.6}", b.name, b.target, b.side, b.value);
    }
    for v in &r.verdicts {
        println!("[{}] {}: {:.6} vs {:.6}", if v.pass { "ok" } else { "FAIL" }, v.name, v.lhs, v.rhs);
    }
    for v in r.consistency.iter().filter(|v| !v.pass) {
        println!("note: {} ({:.6} vs {:.6})", v.name, v.lhs, v.rhs);
    }
    if let Some(path) = out {
        std::fs::write(&path, r.to_json()?)?;
        println!("wrote {path}");
    }
    Ok(())
}
