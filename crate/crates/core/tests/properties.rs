use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectral_bounds::curvature::curvature_profile;
use spectral_bounds::discrete_cheeger::{cheeger_lower_discrete, coarea_discrete_check, random_intrinsic};
use spectral_bounds::generators::{antitree, bethe, bethe_with_lengths};
use spectral_bounds::io::{from_mgraph_str, to_mgraph_string};
use spectral_bounds::isoperimetry::{alpha_comb_exhaustive, alpha_exhaustive};
use spectral_bounds::linalg::EigenOptions;
use spectral_bounds::spectra::{lambda0_discrete, lambda0_quantum};
use spectral_bounds::volume::{ball_volume, Point};
use spectral_bounds::{FamilySpec, Metric, MetricGraph};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
}

fn layered(beta: usize, depth: usize, lens: &[f64]) -> MetricGraph {
    bethe_with_lengths(beta, depth, |n| lens[n % lens.len()]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_lengths(c in 0.2f64..5.0, lens in prop::collection::vec(0.3f64..3.0, 1..4)) {
        let g = layered(3, 3, &lens);
        let h = g.scaled(c).unwrap();

        let (a, b) = (alpha_exhaustive(&g, 5).unwrap(), alpha_exhaustive(&h, 5).unwrap());
        prop_assert!(close(b.value_upper, a.value_upper / c, 1e-9));
        let (a, b) = (alpha_comb_exhaustive(&g, 5).unwrap(), alpha_comb_exhaustive(&h, 5).unwrap());
        prop_assert!(close(b.value_upper, a.value_upper, 1e-12));

        let (p, q) = (curvature_profile(&g), curvature_profile(&h));
        for (x, y) in p.k.iter().zip(&q.k) {
            if x.is_finite() {
                prop_assert!(close(*y, x / c, 1e-9));
            }
        }

        let opts = EigenOptions::default();
        let (x, y) = (lambda0_discrete(&g, &opts).unwrap(), lambda0_discrete(&h, &opts).unwrap());
        prop_assert!(close(y.lambda0, x.lambda0 / (c * c), 1e-6));
        let (x, y) = (lambda0_quantum(&g, 0.1, &opts).unwrap(), lambda0_quantum(&h, 0.1 * c, &opts).unwrap());
        prop_assert!(close(y.lambda0, x.lambda0 / (c * c), 1e-6));
    }

    #[test]
    fn vertex_weights_homogeneous(c in 0.1f64..10.0, lens in prop::collection::vec(0.1f64..4.0, 1..5)) {
        let g = layered(4, 3, &lens);
        let h = g.scaled(c).unwrap();
        for (x, y) in g.vertex_weights().iter().zip(h.vertex_weights()) {
            prop_assert!(close(y, c * x, 1e-12));
        }
    }

    #[test]
    fn path_distance_triangle(lens in prop::collection::vec(0.1f64..4.0, 1..5), a in 0usize..40, b in 0usize..40) {
        let g = layered(3, 4, &lens);
        let n = g.num_vertices();
        let (a, b) = (a % n, b % n);
        for metric in [Metric::Rho0, Metric::Rhom] {
            let da = g.path_distances(a, metric).unwrap();
            let db = g.path_distances(b, metric).unwrap();
            prop_assert_eq!(da[a], 0.0);
            prop_assert!(close(da[b], db[a], 1e-12));
            for v in 0..n {
                prop_assert!(da[v] <= da[b] + db[v] + 1e-9);
            }
        }
    }

    #[test]
    fn mgraph_roundtrip(beta in 3usize..5, depth in 1usize..4, q in 1u32..3, s in 0.0f64..2.0) {
        for spec in [
            FamilySpec::Bethe { beta, depth },
            FamilySpec::Antitree { q, s, depth: depth + 1 },
            FamilySpec::Lattice { dim: 2, radius: depth + 1, length: 0.5 + s },
        ] {
            let g = spec.generate().unwrap();
            let text = to_mgraph_string(&g);
            prop_assert_eq!(&text, &to_mgraph_string(&spec.generate().unwrap()));
            let back = from_mgraph_str(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(to_mgraph_string(&back), text);
        }
    }

    #[test]
    fn ball_volume_monotone(lens in prop::collection::vec(0.2f64..2.0, 1..4), r in prop::collection::vec(0.0f64..6.0, 2..8)) {
        let g = layered(3, 4, &lens);
        let mut r = r;
        r.sort_by(f64::total_cmp);
        let center = Point::Vertex { id: g.root() };
        let vols: Vec<f64> = r.iter().map(|&r| ball_volume(&g, &center, r).unwrap()).collect();
        for w in vols.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
        prop_assert!(*vols.last().unwrap() <= g.total_length() + 1e-9);
    }

    #[test]
    fn discrete_coarea_and_cheeger(seed in 0u64..1000, n in 3usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_intrinsic(&mut rng, n).unwrap();
        let f: Vec<f64> = (0..w.num_vertices()).map(|i| ((seed as f64 + 1.0) * (i as f64 + 0.5)).sin().abs()).collect();
        let co = coarea_discrete_check(&w, &f).unwrap();
        prop_assert!(co.max_relative_gap() < 1e-9, "{:?}", co);

        let ch = cheeger_lower_discrete(&w, n, None).unwrap();
        prop_assert!(ch.exact);
        prop_assert!(close(ch.bound, ch.alpha * ch.alpha / 2.0, 1e-12));
        let lam = w.lambda0(&EigenOptions::default()).unwrap().lambda;
        prop_assert!(ch.bound <= lam + 1e-9, "bound {} above lambda0 {}", ch.bound, lam);
    }
}

#[test]
fn equilateral_curvature_identity() {
    for g in [bethe(3, 5).unwrap(), bethe(5, 3).unwrap(), antitree(2, 0.0, 6).unwrap()] {
        assert!(g.is_equilateral());
        let p = curvature_profile(&g);
        let mut checked = 0;
        for v in 0..g.num_vertices() {
            let (kc, kd) = (p.k_comb[v], p.k_d[v]);
            if g.is_dirichlet(v) || kc == 0.0 || kd == 0.0 || !kc.is_finite() || !kd.is_finite() {
                continue;
            }
            assert!(close(2.0 / kc, 1.0 + 1.0 / kd, 1e-9), "vertex {v}: K_comb {kc}, K_d {kd}");
            checked += 1;
        }
        assert!(checked > 0);
    }
}

#[test]
fn equilateral_transfer_matches() {
    let opts = EigenOptions::default();
    for g in [bethe(3, 6).unwrap(), antitree(1, 0.0, 8).unwrap()] {
        let q = lambda0_quantum(&g, 0.05, &opts).unwrap().lambda0;
        let d = lambda0_discrete(&g, &opts).unwrap().lambda0;
        let transfer = 1.0 - q.sqrt().cos();
        assert!(close(d, transfer, 1e-3), "{d} vs {transfer}");
    }
}
