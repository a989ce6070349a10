//! Volume growth of a sparse tree: ball volumes around the root, the
//! exponential rate μ and its uniform counterpart μ_*.
//!
//!     cargo run --release --example sparse_tree_volume -- [depth]

use spectral_bounds::generators::{sparse_tree, SparseTreeOptions};
use spectral_bounds::volume::{log_grid, mu_estimate, mu_star_estimate, sample_centers, volume_table, Point};

fn main() -> spectral_bounds::Result<()> {
    let depth: usize = std::env::args().nth(1).map_or(10, |s| s.parse().expect("depth"));
    let g = sparse_tree(depth, SparseTreeOptions::default())?;
    println!("sparse tree depth {depth}: {} edges, total length {:.1}", g.num_edges(), g.total_length());

    let root = Point::Vertex { id: g.root() };
    let table = volume_table(&g, &root, &log_grid(1.0, 200.0, 12))?;
    println!("valid radius {:.1}", table.valid_radius);
    for ((r, v), c) in table.radii.iter().zip(&table.volumes).zip(&table.censored) {
        println!("  r {r:>8.2}  vol {v:>12.2}{}", if *c { "  (censored)" } else { "" });
    }

    let mu = mu_estimate(&g, &root)?;
    println!("mu: fit {:?}, growth {:?}, estimate {:.4}", mu.tail_fit, mu.growth, mu.estimate);

    let centers = sample_centers(&g);
    let star = mu_star_estimate(&g, &centers, 4.0, 100_000)?;
    if let Some(s) = &star.min_ratio {
        println!("mu_*: smallest log vol/r at r=4 is {:.4} over {} centers", s.ratio, star.samples.len());
    }
    Ok(())
}
