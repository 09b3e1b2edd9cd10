//! Small dense helpers shared across modules.

use faer::Mat;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = a.nrows();
    let m = Mat::<Complex64>::from_fn(n, n, |i, j| a[(i, j)]);
    m.eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigenvalue solver failed: {e:?}")))
}

/// Spectral norm of a matrix (largest singular value).
pub fn spectral_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |m: f64, s| m.max(*s))
}

/// Singular value decomposition `A = U Σ V*` with singular values sorted in
/// decreasing order.
pub struct SortedSvd {
    pub u: DMatrix<Complex64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

pub fn svd_sorted(a: &DMatrix<Complex64>) -> SortedSvd {
    let svd = a.clone().svd(true, true);
    let u0 = svd.u.expect("requested U");
    let v0 = svd.v_t.expect("requested V*").adjoint();
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let u = DMatrix::from_fn(u0.nrows(), k, |r, c| u0[(r, order[c])]);
    let v = DMatrix::from_fn(v0.nrows(), k, |r, c| v0[(r, order[c])]);
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    SortedSvd { u, sigma, v }
}

/// Numerical kernel dimension: singular values below `rel_tol · σ_max`.
pub fn kernel_dimension(a: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let svd = svd_sorted(a);
    let smax = svd.sigma.first().copied().unwrap_or(0.0);
    let deficit = a.ncols().saturating_sub(svd.sigma.len());
    deficit + svd.sigma.iter().filter(|&&s| s <= rel_tol * smax).count()
}

/// Frobenius-type max entry modulus.
pub fn max_abs(a: &DMatrix<Complex64>) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Evaluates `Σ c_k z^k` with coefficients listed constant term first.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Roots of a univariate polynomial (constant term first) from the
/// eigenvalues of its companion matrix, each polished by a few Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = trim(coeffs);
    let d = coeffs.len().saturating_sub(1);
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[d];
    let mut comp = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -coeffs[i] / lead;
    }
    let mut roots = eigenvalues(&comp)?;
    let deriv: Vec<Complex64> = (1..=d).map(|k| coeffs[k] * k as f64).collect();
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let p = horner(coeffs, *r);
            let dp = horner(&deriv, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            let cand = *r - step;
            // Only accept steps that reduce the residual; near multiple roots
            // Newton is ill-conditioned and the eigenvalue is already good.
            if horner(coeffs, cand).norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}

fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1] == Complex64::new(0.0, 0.0) {
        end -= 1;
    }
    &coeffs[..end]
}

/// Monic polynomial with the given roots, constant term first.
pub fn poly_from_roots(roots: &[Complex64], lead: Complex64) -> Vec<Complex64> {
    let mut c = vec![lead];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= ck * r;
        }
        c = next;
    }
    c
}
