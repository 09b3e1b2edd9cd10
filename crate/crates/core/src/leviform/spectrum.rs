use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polyalg::PolyMap;

/// Relative tolerance for the `det H = |det J|²` consistency check.
pub const DET_CHECK_TOL: f64 = 1e-9;

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub matrix: DMatrix<Complex64>,
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: DMatrix<Complex64>,
}

impl HermitianSpectrum {
    pub fn new(h: DMatrix<Complex64>) -> Result<Self> {
        check_hermitian(&h)?;
        let n = h.nrows();
        let eig = h.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(HermitianSpectrum {
            matrix: h,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `‖U Λ U* − H‖ / ‖H‖` in the max-entry norm.
    pub fn reconstruction_error(&self) -> f64 {
        let n = self.matrix.nrows();
        let lam = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(self.eigenvalues[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rec = &self.eigenvectors * lam * self.eigenvectors.adjoint();
        let scale = crate::linalg::max_abs(&self.matrix).max(f64::MIN_POSITIVE);
        crate::linalg::max_abs(&(rec - &self.matrix)) / scale
    }
}

fn check_hermitian(h: &DMatrix<Complex64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let scale = crate::linalg::max_abs(h).max(f64::MIN_POSITIVE);
    let skew = crate::linalg::max_abs(&(h - h.adjoint()));
    if skew > 1e-12 * scale {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian (relative skew {:e})",
            skew / scale
        )));
    }
    Ok(())
}

/// Levi form `H(z) = J(z)* J(z)` of `|F|²` with its spectrum.
///
/// Also checks `det H = |det J|²`, in relative terms, wherever `|det J|²` is
/// not itself at roundoff level compared with `‖H‖ⁿ`.
pub fn levi_form(map: &PolyMap, z: &[Complex64]) -> Result<HermitianSpectrum> {
    if !map.is_square() {
        return Err(Error::InvalidInput("Levi form needs a square map".into()));
    }
    if z.len() != map.n() {
        return Err(Error::DimensionMismatch {
            expected: map.n(),
            found: z.len(),
        });
    }
    let j = map.jacobian_at(z);
    let h = j.adjoint() * &j;
    // Symmetrize away the roundoff of the product.
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let spec = HermitianSpectrum::new(h)?;
    let det_j2 = j.determinant().norm_sqr();
    let det_h = spec.matrix.determinant().re;
    let n = map.n() as i32;
    let hnorm = crate::linalg::max_abs(&spec.matrix);
    if det_j2 > 1e-6 * hnorm.powi(n) && (det_h - det_j2).abs() > DET_CHECK_TOL * det_j2 {
        return Err(Error::Numerical(format!(
            "det H = {det_h:e} disagrees with |det J|² = {det_j2:e}"
        )));
    }
    Ok(spec)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &DMatrix<Complex64>) -> Result<f64> {
    Ok(HermitianSpectrum::new(h.clone())?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::PolyMap;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_squares() {
        let f = PolyMap::diagonal_power(2, 2);
        let spec = levi_form(&f, &[c(1.0), c(0.5)]).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 4.0).abs() < 1e-14);
        assert!(spec.reconstruction_error() < 1e-10);
    }

    #[test]
    fn identity_levi_form() {
        let f = PolyMap::identity(3);
        let spec = levi_form(&f, &[c(0.2), c(-1.0), Complex64::new(0.0, 3.0)]).unwrap();
        for l in spec.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn two_by_two_min() {
        let h = DMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(1.0), c(2.0)]);
        assert!((min_eigenvalue(&h).unwrap() - 1.0).abs() < 1e-14);
        let d = DMatrix::from_row_slice(2, 2, &[c(4.0), c(0.0), c(0.0), c(1.0)]);
        assert!((min_eigenvalue(&d).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = DMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(0.0), c(2.0)]);
        assert!(min_eigenvalue(&h).is_err());
    }
}
