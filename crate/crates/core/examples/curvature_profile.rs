//! Curvature K, K_comb, K_d of an antitree and the isoperimetric lower
//! bounds they imply.
//!
//!     cargo run --release --example curvature_profile -- [q] [s] [depth]

use spectral_bounds::curvature::{curvature_alpha_bounds, curvature_profile, essential_curvature_limits};
use spectral_bounds::generators::antitree;

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1);
    let q: u32 = args.next().map_or(1, |s| s.parse().expect("q"));
    let s: f64 = args.next().map_or(1.0, |s| s.parse().expect("s"));
    let depth: usize = args.next().map_or(12, |s| s.parse().expect("depth"));

    let g = antitree(q, s, depth)?;
    let p = curvature_profile(&g);
    println!("antitree q={q} s={s} depth={depth}: {} vertices", g.num_vertices());
    println!("sphere  min K      min K_comb  min K_d");
    for n in 0..depth {
        let at = |k: &[f64]| {
            (0..g.num_vertices())
                .filter(|&v| g.vertices()[v].sphere == n && !g.is_dirichlet(v))
                .map(|v| k[v])
                .fold(f64::INFINITY, f64::min)
        };
        println!("{n:>6}  {:<9.4}  {:<10.4}  {:.4}", at(&p.k), at(&p.k_comb), at(&p.k_d));
    }

    let ess = essential_curvature_limits(&p);
    println!("K_ess ~ {:.4} (diverging {}), K_comb_ess ~ {:.4}", ess.k_ess.value, ess.k_ess.diverging, ess.k_comb_ess.value);

    let ex = g.length_extremes(&[])?;
    for b in curvature_alpha_bounds(&p, &ex).iter().filter(|b| b.applicable) {
        println!("{:<28} {:?} {:?} {:.5}  ({})", b.name, b.target, b.side, b.value, b.source);
    }
    Ok(())
}
