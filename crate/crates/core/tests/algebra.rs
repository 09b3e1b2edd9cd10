//! Jet algebra, Levi form and projector properties against direct
//! computations.

mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subgap_core::leviform::{levi_form, resolvent_projector};
use subgap_core::linalg::{max_abs, poly_from_roots, poly_roots};
use subgap_core::polyalg::{compose_jet, vanishing_order, Jet, MultiPoly, Order, PolyMap, VecJet};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `∂²|F|²/∂z_i∂z̄_j = Σ_k conj(∂_i F_k) ∂_j F_k`, by central differences of
/// the holomorphic derivatives.
fn levi_by_differences(map: &PolyMap, z: &[Complex64]) -> DMatrix<Complex64> {
    let n = map.n();
    let h = 1e-6;
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut zp = z.to_vec();
        let mut zm = z.to_vec();
        zp[j] += h;
        zm[j] -= h;
        let fp = map.evaluate(&zp).unwrap();
        let fm = map.evaluate(&zm).unwrap();
        for k in 0..n {
            jac[(k, j)] = (fp[k] - fm[k]) / (2.0 * h);
        }
    }
    jac.adjoint() * jac
}

#[test]
fn levi_form_matches_difference_quotients() {
    let mut r = rng(1);
    for _ in 0..10 {
        let map = random_homogeneous_map(&mut r, 3, 3);
        let z = sphere_point(&mut r, 3);
        let h = levi_form(&map, &z).unwrap().matrix;
        let fd = levi_by_differences(&map, &z);
        let err = max_abs(&(h.transpose() - &fd)).min(max_abs(&(&h - &fd)));
        assert!(err < 1e-6 * max_abs(&fd).max(1.0), "{err}");
    }
}

#[test]
fn diagonal_power_determinant() {
    // det J of (z_i^d) is d^n Π z_i^{d-1}
    for n in 1..=3 {
        for d in 1..=3u32 {
            let det = PolyMap::diagonal_power(n, d).det_jacobian().unwrap();
            let want = (d as f64).powi(n as i32);
            let e = vec![d - 1; n];
            assert_eq!(det.coeff(&e), Complex64::new(want, 0.0));
            assert_eq!(det.num_terms(), 1);
        }
    }
}

#[test]
fn json_round_trip() {
    let mut r = rng(2);
    for n in 1..=3 {
        let map = random_homogeneous_map(&mut r, n, 2);
        let back = PolyMap::from_json_str(&map.to_json_string()).unwrap();
        assert_eq!(back.to_json_string(), map.to_json_string());
        let z = sphere_point(&mut r, n);
        assert_eq!(back.evaluate(&z).unwrap(), map.evaluate(&z).unwrap());
    }
}

#[test]
fn roots_round_trip() {
    let roots = [c(0.1), Complex64::new(-0.2, 0.3), Complex64::new(0.05, -0.4)];
    let p = poly_from_roots(&roots, c(2.0));
    let mut found = poly_roots(&p).unwrap();
    for r in roots {
        let (i, d) = found
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!(d < 1e-12);
        found.remove(i);
    }
}

fn cplx() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn composed_jet_matches_evaluation(seed in 0u64..1000, zeta in cplx()) {
        // F∘ψ as a jet, evaluated at small ζ, equals F(ψ(ζ)) when the jet
        // order covers the full degree
        let mut r = rng(seed);
        let map = random_homogeneous_map(&mut r, 2, 3);
        let cols: Vec<Vec<Complex64>> = (0..3).map(|_| sphere_point(&mut r, 2)).collect();
        let psi = VecJet::from_powers(2, 2, &cols);
        let g = compose_jet(&map, &psi, 6).unwrap();
        let z = zeta * 0.3;
        let direct = map.evaluate(&psi.eval(z)).unwrap();
        for (a, b) in g.eval(z).iter().zip(&direct) {
            prop_assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn vanishing_order_invariant_under_reparametrization(
        k in 1usize..5, a in cplx(), b in cplx(), s in 0.2f64..2.0
    ) {
        // f = (ζ^k, ζ^{k+1}) precomposed with ζ ↦ sζ + aζ² + bζ³
        let ord = 10;
        let mut f0 = Jet::zero(ord);
        f0.set_coeff(k, c(1.0));
        let mut f1 = Jet::zero(ord);
        f1.set_coeff(k + 1, c(1.0));
        let f = VecJet(vec![f0, f1]);
        let inner = Jet::from_coeffs(ord, &[c(0.0), c(s), a, b]);
        let g = f.reparametrize(&inner).unwrap();
        prop_assert_eq!(vanishing_order(&g), Order::Finite(k));
    }

    #[test]
    fn determinant_of_levi_form(seed in 0u64..1000, n in 2usize..4, d in 1u32..4) {
        let mut r = rng(seed);
        let map = random_homogeneous_map(&mut r, n, d);
        let z = sphere_point(&mut r, n);
        let spec = levi_form(&map, &z).unwrap();
        let det_h: f64 = spec.eigenvalues.iter().product();
        let dj = map.det_jacobian().unwrap().eval(&z).norm_sqr();
        prop_assert!((det_h - dj).abs() <= 1e-9 * dj.max(spec.eigenvalues[n - 1].powi(n as i32)));
    }

    #[test]
    fn min_eigenvalue_scaling(seed in 0u64..1000, d in 1u32..4, rr in 0.3f64..3.0) {
        let mut r = rng(seed);
        let map = random_homogeneous_map(&mut r, 2, d);
        let z = sphere_point(&mut r, 2);
        let zr: Vec<Complex64> = z.iter().map(|v| v * rr).collect();
        let l1 = levi_form(&map, &z).unwrap().eigenvalues[0];
        let l2 = levi_form(&map, &zr).unwrap().eigenvalues[0];
        let top = levi_form(&map, &z).unwrap().eigenvalues[1];
        let want = rr.powi(2 * d as i32 - 2) * l1;
        prop_assert!((l2 - want).abs() <= 1e-10 * rr.powi(2 * d as i32 - 2) * top);
    }

    #[test]
    fn projector_rank_is_inner_count(seed in 0u64..1000, n in 2usize..6) {
        let mut r = rng(seed);
        let k = 1 + (seed as usize % (n - 1));
        let a = separated_matrix(&mut r, n, k);
        let p = resolvent_projector(&a, c(0.0), 1.0, 128).unwrap();
        let trace: Complex64 = (0..n).map(|i| p[(i, i)]).sum();
        prop_assert!((trace - c(k as f64)).norm() < 1e-9);
        prop_assert!(max_abs(&(&p * &p - &p)) < 1e-8);
        prop_assert!(max_abs(&(&a * &p - &p * &a)) < 1e-8);
    }

    #[test]
    fn multipoly_product_evaluates(seed in 0u64..1000) {
        let mut r = rng(seed);
        let m = random_homogeneous_map(&mut r, 2, 2);
        let (f, g) = (&m.components()[0], &m.components()[1]);
        let z = sphere_point(&mut r, 2);
        let prod: MultiPoly = f * g;
        let want = f.eval(&z) * g.eval(&z);
        prop_assert!((prod.eval(&z) - want).norm() < 1e-12 * (1.0 + want.norm()));
    }
}
