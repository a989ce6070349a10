//! λ₀ of equilateral Bethe-lattice truncations, quantum and discrete, next
//! to the closed form of the infinite tree.
//!
//!     cargo run --release --example bethe_spectrum -- [max_depth] [mesh]

use std::time::Instant;

use spectral_bounds::linalg::EigenOptions;
use spectral_bounds::spectra::{equilateral_transfer, lambda0_sequence, Mode};
use spectral_bounds::FamilySpec;

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1);
    let max_depth: usize = args.next().map_or(10, |s| s.parse().expect("depth"));
    let mesh: f64 = args.next().map_or(1.0 / 50.0, |s| s.parse().expect("mesh"));

    let beta = 3.0f64;
    let exact = (2.0 * (beta - 1.0).sqrt() / beta).acos().powi(2);
    println!("infinite T3: lambda0 = arccos^2(2 sqrt2/3) = {exact:.6}");

    let spec = FamilySpec::Bethe { beta: 3, depth: max_depth };
    let depths: Vec<usize> = (4..=max_depth).collect();
    let opts = EigenOptions::default();

    let t = Instant::now();
    let q = lambda0_sequence(&spec, &depths, Mode::Quantum, Some(mesh), &opts)?;
    let d = lambda0_sequence(&spec, &depths, Mode::Discrete, None, &opts)?;
    println!("depth  quantum     discrete    1-cos(sqrt q)  gap");
    for ((n, lq), (_, ld)) in q.monotone_history.iter().zip(&d.monotone_history) {
        let tr = equilateral_transfer(*lq)?;
        println!("{n:>5}  {lq:.6}  {ld:.6}  {tr:.6}     {:.1e}", (tr - ld).abs());
    }
    println!(
        "monotone: quantum {:?}, discrete {:?}; last within {:.1}% of the infinite tree ({:.1?})",
        q.monotone,
        d.monotone,
        100.0 * (q.lambda0 - exact) / exact,
        t.elapsed()
    );
    Ok(())
}
