//! Exhaustive isoperimetric constants of a small Bethe truncation: the
//! metric α, α_d and α_comb with their minimizing witnesses, next to the
//! ratios of sphere balls.
//!
//!     cargo run --release --example isoperimetric_enumeration -- [beta] [depth] [cap]

use spectral_bounds::generators::bethe;
use spectral_bounds::isoperimetry::{alpha_comb_exhaustive, alpha_d_exhaustive, alpha_exhaustive, ball_ratios, Witness};

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1);
    let beta: usize = args.next().map_or(3, |s| s.parse().expect("beta"));
    let depth: usize = args.next().map_or(6, |s| s.parse().expect("depth"));
    let cap: usize = args.next().map_or(9, |s| s.parse().expect("cap"));

    let g = bethe(beta, depth)?;
    println!("T{beta} depth {depth}: {} edges, cap {cap}", g.num_edges());
    for r in [alpha_exhaustive(&g, cap)?, alpha_d_exhaustive(&g, cap)?, alpha_comb_exhaustive(&g, cap)?] {
        let size = match &r.witness {
            Witness::Subgraph(w) => format!("{} edges, deg(boundary) {}", w.edge_ids.len(), w.deg_boundary),
            Witness::Vertices(w) => format!("{} vertices, boundary {:.3}", w.vertex_ids.len(), w.boundary),
        };
        println!(
            "{:<14} {:.5}  exhaustive {}  examined {}  witness: {size}",
            format!("{:?}", r.kind),
            r.value_upper,
            r.exhaustive_within_cap,
            r.examined
        );
    }
    println!("ball ratios deg/mes:");
    for (n, r) in ball_ratios(&g) {
        println!("  B_{n}: {r:.5}");
    }
    println!("infinite tree: alpha = {}", beta - 2);
    Ok(())
}
