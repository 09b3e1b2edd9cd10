use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, kernel_dimension, max_abs, svd_sorted};

/// Relative singular-value threshold used to decide kernel dimension.
pub const KERNEL_TOL: f64 = 1e-8;

/// Minimum number of quadrature nodes on the contour.
pub const MIN_NODES: usize = 64;

pub(crate) fn contour_node(center: Complex64, radius: f64, k: usize, nodes: usize) -> (Complex64, Complex64) {
    let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
    // (ζ_k, weight) with Π ≈ Σ weight · (ζ_k − A)⁻¹
    (center + w * radius, w * radius / nodes as f64)
}

/// Rejects contours that pass within `10 ε ‖A‖` of an eigenvalue.
pub(crate) fn check_contour(a: &DMatrix<Complex64>, center: Complex64, radius: f64) -> Result<()> {
    let guard = 10.0 * f64::EPSILON * max_abs(a).max(1.0);
    for lam in eigenvalues(a)? {
        let distance = ((lam - center).norm() - radius).abs();
        if distance <= guard {
            return Err(Error::NearContour { distance });
        }
    }
    Ok(())
}

/// Riesz projector `(1/2πi) ∮ (ζI − A)⁻¹ dζ` over the circle
/// `|ζ − center| = radius`, by the trapezoidal rule with `nodes` points.
pub fn resolvent_projector(
    a: &DMatrix<Complex64>,
    center: Complex64,
    radius: f64,
    nodes: usize,
) -> Result<DMatrix<Complex64>> {
    if !a.is_square() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("contour radius must be positive".into()));
    }
    if nodes < MIN_NODES {
        return Err(Error::InvalidInput(format!("need at least {MIN_NODES} nodes")));
    }
    check_contour(a, center, radius)?;
    let n = a.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut pi = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..nodes {
        let (zeta, w) = contour_node(center, radius, k, nodes);
        let shifted = &id * zeta - a;
        let inv = shifted
            .try_inverse()
            .ok_or(Error::NearContour { distance: 0.0 })?;
        pi += inv * w;
    }
    Ok(pi)
}

/// A unitary `M` with `ker(M J) ∩ range(M J) = {0}` for a corank-one `J`.
///
/// With `J = U Σ V*`, the choice `M = V U*` makes `M J = V Σ V*` Hermitian
/// positive semidefinite, so its zero eigenvalue is simple.
pub fn unitary_separation(j: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if !j.is_square() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let dim = kernel_dimension(j, KERNEL_TOL);
    if dim != 1 {
        return Err(Error::hypothesis(format!(
            "kernel dimension is {dim}, expected 1"
        )));
    }
    let mut svd = svd_sorted(j);
    // The phase pairing of the null singular vectors is arbitrary; align
    // them so that M = I whenever kernel and range are already orthogonal.
    let n = j.nrows();
    let ip = svd.u.column(n - 1).dotc(&svd.v.column(n - 1));
    if ip.norm() > 1e-12 {
        let phase = ip / ip.norm();
        let col = svd.u.column(n - 1) * phase;
        svd.u.set_column(n - 1, &col);
    }
    Ok(&svd.v * svd.u.adjoint())
}

/// Eigenvalues of `M J` with modulus below `eps`, used to certify that the
/// zero eigenvalue is simple.
pub fn small_eigenvalue_count(mj: &DMatrix<Complex64>, eps: f64) -> Result<usize> {
    Ok(eigenvalues(mj)?.iter().filter(|l| l.norm() < eps).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        max_abs(&(a - b)) < tol
    }

    #[test]
    fn diagonal_projector() {
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(5.0)]);
        let pi = resolvent_projector(&a, c(0.0), 1.0, 256).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!(close(&pi, &expect, 1e-12));
    }

    #[test]
    fn upper_triangular_projector() {
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(5.0)]);
        let pi = resolvent_projector(&a, c(0.0), 1.0, 256).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[c(1.0), c(-0.2), c(0.0), c(0.0)]);
        assert!(close(&pi, &expect, 1e-12));
    }

    #[test]
    fn contour_through_eigenvalue_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(5.0)]);
        assert!(matches!(
            resolvent_projector(&a, c(0.0), 1.0, 128),
            Err(Error::NearContour { .. })
        ));
    }

    #[test]
    fn nilpotent_separation() {
        let j = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        let m = unitary_separation(&j).unwrap();
        let mj = &m * &j;
        assert!(close(&(m.adjoint() * &m), &DMatrix::identity(2, 2), 1e-14));
        let expect = DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(1.0)]);
        assert!(close(&mj, &expect, 1e-14));
        assert_eq!(small_eigenvalue_count(&mj, 0.5).unwrap(), 1);
    }

    #[test]
    fn separation_needs_corank_one() {
        let id = DMatrix::<Complex64>::identity(2, 2);
        assert!(unitary_separation(&id).is_err());
        let z = DMatrix::<Complex64>::zeros(2, 2);
        assert!(unitary_separation(&z).is_err());
    }
}
