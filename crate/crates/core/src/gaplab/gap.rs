use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::assemble::WeightedFormAssembly;
use crate::error::{Error, Result};

/// Solver knobs for [`min_gap`].
#[derive(Clone, Copy, Debug)]
pub struct GapOptions {
    pub block: usize,
    pub max_iterations: usize,
    /// Relative change of the smallest Ritz value that counts as converged.
    pub tolerance: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            block: 6,
            max_iterations: 500,
            tolerance: 1e-10,
        }
    }
}

/// Smallest eigenvalue of the (energy, mass) pencil.
#[derive(Clone, Debug, Serialize)]
pub struct GapResult {
    pub gap: f64,
    /// Minimizer in the unitary gauge `u = e^{−φ} w`, unit mass.
    #[serde(skip)]
    pub minimizer: Vec<Complex64>,
    pub iterations: usize,
    pub resolution: usize,
    pub radius: f64,
    pub center: [f64; 2],
    pub active_points: usize,
    /// Next Ritz value, useful to judge how isolated the gap is.
    pub second: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalizes the columns in place (two passes of Gram-Schmidt) and
/// drops columns that become numerically dependent.
fn orthonormalize(cols: &mut Vec<Vec<Complex64>>) {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(cols.len());
    for mut c in cols.drain(..) {
        let before = norm(&c);
        for _ in 0..2 {
            for q in &out {
                let p = dot(q, &c);
                for (ci, qi) in c.iter_mut().zip(q) {
                    *ci -= p * qi;
                }
            }
        }
        let nn = norm(&c);
        if nn > 1e-10 * before && nn > 0.0 {
            c.iter_mut().for_each(|x| *x /= nn);
            out.push(c);
        }
    }
    *cols = out;
}

fn start_block(a: &WeightedFormAssembly, block: usize) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut cols = vec![vec![Complex64::new(1.0, 0.0); n]];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 1..block {
        cols.push(
            (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        );
    }
    cols
}

/// Smallest generalized eigenvalue of the assembled form by shift-invert
/// block subspace iteration with Rayleigh-Ritz, started from the all-ones
/// vector.
///
/// The shift sits slightly below zero (`−10⁻³/r²`) so that the shifted
/// energy matrix is positive definite even when constants are in the kernel.
pub fn min_gap(a: &WeightedFormAssembly) -> Result<GapResult> {
    min_gap_with(a, GapOptions::default())
}

pub fn min_gap_with(a: &WeightedFormAssembly, opts: GapOptions) -> Result<GapResult> {
    let n = a.len();
    let block = opts.block.clamp(1, n);
    let sigma = -1e-3 / (a.grid.radius * a.grid.radius);
    let mat = a.shifted_energy(sigma)?;
    let llt = mat
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Cholesky factorization failed: {e:?}")))?;
    let mut x = start_block(a, block);
    orthonormalize(&mut x);
    let mut prev = f64::INFINITY;
    let mut ritz = (f64::INFINITY, f64::INFINITY);
    for it in 1..=opts.max_iterations {
        let b = x.len();
        let rhs = Mat::<Complex64>::from_fn(n, b, |i, j| x[j][i]);
        let sol = llt.solve(&rhs);
        let mut y: Vec<Vec<Complex64>> = (0..b).map(|j| (0..n).map(|i| sol[(i, j)]).collect()).collect();
        orthonormalize(&mut y);
        let ky: Vec<Vec<Complex64>> = y.iter().map(|c| a.apply(c)).collect();
        let m = y.len();
        let small = DMatrix::from_fn(m, m, |i, j| dot(&y[i], &ky[j]));
        let small = (&small + small.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = small.symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        x = order
            .iter()
            .map(|&k| {
                let mut c = vec![Complex64::new(0.0, 0.0); n];
                for (j, yj) in y.iter().enumerate() {
                    let q = eig.eigenvectors[(j, k)];
                    for (ci, yi) in c.iter_mut().zip(yj) {
                        *ci += q * yi;
                    }
                }
                c
            })
            .collect();
        let lam = eig.eigenvalues[order[0]];
        let next = order.get(1).map_or(f64::INFINITY, |&k| eig.eigenvalues[k]);
        ritz = (lam, next);
        let scale = lam.abs().max(sigma.abs());
        if (lam - prev).abs() < opts.tolerance * scale {
            return Ok(finish(a, x.swap_remove(0), it, ritz.1));
        }
        prev = lam;
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        best: ritz.0,
    })
}

fn finish(a: &WeightedFormAssembly, u: Vec<Complex64>, iterations: usize, second: f64) -> GapResult {
    let m = a.mass(&u).sqrt();
    let u: Vec<Complex64> = u.into_iter().map(|x| x / m).collect();
    GapResult {
        gap: a.rayleigh(&u),
        minimizer: u,
        iterations,
        resolution: a.grid.n,
        radius: a.grid.radius,
        center: [a.grid.center.re, a.grid.center.im],
        active_points: a.len(),
        second,
    }
}
