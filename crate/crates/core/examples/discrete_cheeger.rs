//! Cheeger bound λ₀ ≥ α²/2 on random intrinsic weighted graphs, and on
//! the normalized operator of a metric graph.
//!
//!     cargo run --release --example discrete_cheeger -- [seed] [n]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_bounds::discrete_cheeger::{cheeger_lower_discrete, is_intrinsic, random_intrinsic, WeightedGraph};
use spectral_bounds::generators::bethe;
use spectral_bounds::linalg::EigenOptions;

fn main() -> spectral_bounds::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let n: usize = args.next().map_or(9, |s| s.parse().expect("n"));
    let opts = EigenOptions::default();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("trial  intrinsic  alpha    alpha^2/2  lambda0");
    for t in 0..5 {
        let w = random_intrinsic(&mut rng, n)?;
        let ch = cheeger_lower_discrete(&w, n, None)?;
        let lam = w.lambda0(&opts)?.lambda;
        println!("{t:>5}  {:<9}  {:.5}  {:.5}    {lam:.5}", is_intrinsic(&w)?.intrinsic, ch.alpha, ch.bound);
    }

    let w = WeightedGraph::from_metric(&bethe(3, 4)?);
    let ch = cheeger_lower_discrete(&w, 8, None)?;
    println!(
        "T3 depth 4: alpha <= {:.5} (exact {}), bound {:.5}, lambda0 {:.5}",
        ch.alpha,
        ch.exact,
        ch.bound,
        w.lambda0(&opts)?.lambda
    );
    Ok(())
}
