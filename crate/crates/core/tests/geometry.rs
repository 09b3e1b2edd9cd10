//! Cluster covers, sublevel constants and discrete gaps.

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subgap_core::gaplab::{
    dbar_up_gap, min_gap, radial_model_gap, scaling_check, DiscGrid, Flat, HermitianPoly, WeightedFormAssembly,
};
use subgap_core::linalg::poly_from_roots;
use subgap_core::rootgeom::{check_cover, choose_radius, greedy_cluster, sublevel_decomposition, verify_sublevel};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_cover_is_valid(seed in 0u64..100_000, n in 1usize..13, log_l in -4.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_metric_space(&mut rng, n);
        let l = 10f64.powf(log_l);
        let cover = greedy_cluster(&space, l).unwrap();
        prop_assert_eq!(check_cover(&space, &cover), Ok(()));
    }

    #[test]
    fn radius_is_power_of_four_with_empty_annulus(seed in 0u64..100_000, n in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let space = random_metric_space(&mut rng, n);
        let l = 0.01;
        for x in 0..n {
            let r = choose_radius(&space, x, l);
            let j = (r / l).log(4.0);
            prop_assert!((j - j.round()).abs() < 1e-9 && j.round() <= (n - 1) as f64);
            for s in 0..n {
                let d = space.d(x, s);
                prop_assert!(!(r < d && d <= 4.0 * r));
            }
        }
    }
}

#[test]
fn single_point_cover() {
    let space = subgap_core::rootgeom::FiniteMetricSpace::from_points(&[c(0.0)]).unwrap();
    let cover = greedy_cluster(&space, 1.0).unwrap();
    assert_eq!(cover.centers, vec![0]);
    assert_eq!(cover.radii, vec![1.0]);
}

#[test]
fn sublevel_constants_finite_for_random_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for d in 1..=6 {
        for _ in 0..4 {
            let roots: Vec<Complex64> = (0..d)
                .map(|_| Complex64::from_polar(0.45 * rng.random::<f64>().sqrt(), rng.random_range(0.0..6.3)))
                .collect();
            let a = 10f64.powf(rng.random_range(2.0..6.0));
            let p = poly_from_roots(&roots, c(a));
            let cover = sublevel_decomposition(&p).unwrap();
            assert_eq!(cover.degree, d);
            assert!((cover.leading_modulus - a).abs() < 1e-9 * a);
            let k = verify_sublevel(&cover, 48);
            for v in [k.k1, k.k2, k.k3] {
                assert!(v.is_finite() && v > 0.0, "{k:?}");
            }
        }
    }
}

#[test]
fn roots_outside_half_disc_are_rejected() {
    let p = poly_from_roots(&[c(0.7)], c(1.0));
    assert!(sublevel_decomposition(&p).is_err());
}

#[test]
fn flat_weight_constant_potential_gap_is_the_constant() {
    // constants are in the kernel of the discrete dbar, so the minimum is V
    for v in [0.5, 3.0, 40.0] {
        let grid = DiscGrid::unit(32).unwrap();
        let asm = WeightedFormAssembly::from_weight(grid.clone(), &Flat, vec![v; grid.len()]).unwrap();
        let g = min_gap(&asm).unwrap().gap;
        assert!((g - v).abs() < 1e-8 * v, "{g} vs {v}");
    }
}

#[test]
fn uncertainty_gap_dilation() {
    // gap(c, r) = gap(c r², 1) / r² on matched grids
    for (cc, r) in [(1.0, 0.5), (10.0, 2.0), (0.1, 1.5)] {
        let a = dbar_up_gap(c(0.0), cc, r, 32).unwrap().gap;
        let b = dbar_up_gap(c(0.0), cc * r * r, 1.0, 32).unwrap().gap / (r * r);
        assert!((a - b).abs() < 1e-7 * b, "{a} vs {b}");
    }
}

#[test]
fn radial_gap_increases_with_amplitude() {
    let gaps: Vec<f64> = [1e1, 1e2, 1e3].iter().map(|&a| radial_model_gap(1, a, 48).unwrap().gap).collect();
    assert!(gaps.windows(2).all(|w| w[1] > w[0]), "{gaps:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dilation_identity(seed in 0u64..10_000, log_r in -0.5f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for k in 1..=2u32 {
            terms.push((k, k, c(rng.random_range(0.1..2.0))));
            terms.push((k, 0, cnormal(&mut rng)));
        }
        let phi = HermitianPoly { terms };
        let a = cnormal(&mut rng);
        let w = move |z: Complex64| a + z * z;
        let err = scaling_check(&phi, &w, 10f64.powf(log_r), 32).unwrap();
        prop_assert!(err <= 1e-12, "{}", err);
    }
}
