#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use subgap_core::polyalg::{MultiPoly, PolyMap};
use subgap_core::rootgeom::FiniteMetricSpace;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn cnormal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn sphere_point(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let z: Vec<Complex64> = (0..n).map(|_| cnormal(rng)).collect();
    let r = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    z.into_iter().map(|v| v / r).collect()
}

/// All exponent vectors of total degree `d` in `n` variables.
pub fn exponents(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![d]];
    }
    (0..=d)
        .rev()
        .flat_map(|k| {
            exponents(n - 1, d - k).into_iter().map(move |mut rest| {
                rest.insert(0, k);
                rest
            })
        })
        .collect()
}

/// Square homogeneous map with Gaussian coefficients.
pub fn random_homogeneous_map(rng: &mut impl Rng, n: usize, d: u32) -> PolyMap {
    let comps = (0..n)
        .map(|_| MultiPoly::from_terms(n, exponents(n, d).into_iter().map(|e| (e, cnormal(rng)))).unwrap())
        .collect();
    PolyMap::homogeneous(n, comps, d).unwrap()
}

/// `S D S⁻¹` with `k` eigenvalues in `D(0, 1/2)` and the rest in the
/// annulus `2 ≤ |λ| ≤ 4`; `S` is a small perturbation of the identity.
pub fn separated_matrix(rng: &mut impl Rng, n: usize, k: usize) -> DMatrix<Complex64> {
    let mut d = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let lam = if i < k {
            Complex64::from_polar(0.5 * rng.random::<f64>(), rng.random_range(0.0..6.3))
        } else {
            Complex64::from_polar(rng.random_range(2.0..4.0), rng.random_range(0.0..6.3))
        };
        d[(i, i)] = lam;
    }
    let s = DMatrix::<Complex64>::identity(n, n) + DMatrix::from_fn(n, n, |_, _| cnormal(rng) * 0.2);
    let si = s.clone().try_inverse().unwrap();
    &s * d * si
}

/// Either planar points or shortest paths in a random weighted graph.
pub fn random_metric_space(rng: &mut impl Rng, n: usize) -> FiniteMetricSpace {
    if rng.random::<bool>() {
        let scale = 10f64.powf(rng.random_range(-2.0..2.0));
        let pts: Vec<Complex64> = (0..n).map(|_| cnormal(rng) * scale).collect();
        return FiniteMetricSpace::from_points(&pts).unwrap();
    }
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    // spanning path plus random extra edges with log-uniform weights
    let add = |d: &mut Vec<Vec<f64>>, i: usize, j: usize, w: f64| {
        if w < d[i][j] {
            d[i][j] = w;
            d[j][i] = w;
        }
    };
    for i in 1..n {
        let w = 10f64.powf(rng.random_range(-3.0..1.0));
        add(&mut d, i - 1, i, w);
    }
    for _ in 0..n {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            let w = 10f64.powf(rng.random_range(-3.0..1.0));
            add(&mut d, i, j, w);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(d).unwrap()
}
