//! Spectral bottom of antitrees against the curvature lower bound and the
//! volume-growth upper bound, for several growth exponents s.
//!
//!     cargo run --release --example antitree_bounds -- [depth]

use spectral_bounds::curvature::curvature_profile;
use spectral_bounds::generators::antitree;
use spectral_bounds::linalg::EigenOptions;
use spectral_bounds::spectra::{default_mesh, lambda0_quantum};
use spectral_bounds::volume::{mu_estimate, Point};

fn main() -> spectral_bounds::Result<()> {
    let depth: usize = std::env::args().nth(1).map_or(14, |s| s.parse().expect("depth"));
    let opts = EigenOptions::default();
    println!("q  s     inf K    K^2/4     lambda0   mu^2/4");
    for (q, s) in [(1u32, 0.0), (1, 1.0), (2, 1.0), (1, 2.0)] {
        let g = antitree(q, s, depth)?;
        let k = curvature_profile(&g).inf_k;
        let lam = lambda0_quantum(&g, default_mesh(&g), &opts)?.lambda0;
        let mu = mu_estimate(&g, &Point::Vertex { id: g.root() })?.estimate;
        println!("{q}  {s:<4}  {k:<7.4}  {:<8.5}  {lam:<8.5}  {:.5}", k.max(0.0).powi(2) / 4.0, mu * mu / 4.0);
    }
    Ok(())
}
