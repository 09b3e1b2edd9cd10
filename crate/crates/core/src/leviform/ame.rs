use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::projector::{check_contour, contour_node, unitary_separation, KERNEL_TOL};
use super::spectrum::levi_form;
use crate::error::{Error, Result};
use crate::linalg::{kernel_dimension, max_abs, svd_sorted};
use crate::polyalg::{random_sphere_point, MatSeries, PolyMap, SeriesBasis};

/// Default number of contour nodes for the projector.
pub const DEFAULT_NODES: usize = 256;

/// Idempotence target used when doubling the node count.
pub const IDEMPOTENCE_TOL: f64 = 1e-8;

const MAX_NODES: usize = 1 << 14;

/// Approximate minimal eigenvector field `X(z) = Π(z) v₀` near `p`, with
/// `Π(z)` the Riesz projector of `M J(z)` for its small eigenvalue.
#[derive(Clone, Debug)]
pub struct AmeField {
    pub p: Vec<Complex64>,
    pub v0: DVector<Complex64>,
    pub m: DMatrix<Complex64>,
    pub epsilon: f64,
    pub nodes: usize,
    pub order: usize,
    /// `M J(z)` expanded at `p`.
    pub mj: MatSeries,
    /// `Π(z)` expanded at `p`.
    pub projector: MatSeries,
    /// Small eigenvalue `α(z) = tr(M J(z) Π(z))` expanded at `p`.
    pub alpha: MatSeries,
    /// `X(z)` expanded at `p`, as an `n × 1` series.
    pub field: MatSeries,
    /// Set when `J(p)` is invertible; the field is then the constant `v₀`.
    pub trivial: bool,
}

/// Builds the field at `p` with jets of order `k`.
pub fn ame_field(map: &PolyMap, p: &[Complex64], k: usize) -> Result<AmeField> {
    let n = map.n();
    if !map.is_square() {
        return Err(Error::InvalidInput("AME fields need a square map".into()));
    }
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if p.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
        return Err(Error::InvalidInput("base point must be nonzero".into()));
    }
    let jp = map.jacobian_at(p);
    let basis = SeriesBasis::new(n, k);
    let jac = MatSeries::from_polys(&basis, &map.jacobian(), p);
    match kernel_dimension(&jp, KERNEL_TOL) {
        0 => {
            // Any constant field is minimal enough; use the least singular direction.
            let svd = svd_sorted(&jp);
            let v0 = svd.v.column(n - 1).into_owned();
            let id = DMatrix::identity(n, n);
            let field = MatSeries::constant(&basis, DMatrix::from_column_slice(n, 1, v0.as_slice()));
            return Ok(AmeField {
                p: p.to_vec(),
                v0,
                m: id.clone(),
                epsilon: 0.0,
                nodes: 0,
                order: k,
                mj: jac,
                projector: MatSeries::constant(&basis, id),
                alpha: MatSeries::zero(&basis, 1, 1),
                field,
                trivial: true,
            });
        }
        1 => {}
        dim => {
            return Err(Error::hypothesis_at(
                format!("dim ker J(p) = {dim}; AME fields need a one-dimensional kernel"),
                p.to_vec(),
            ))
        }
    }
    let m = unitary_separation(&jp)?;
    let svd = svd_sorted(&jp);
    let v0 = svd.v.column(n - 1).into_owned();
    // Eigenvalues of M J(p) = V Σ V* are the singular values.
    let epsilon = 0.5 * svd.sigma[n - 2];
    let mut mj = jac.clone();
    for i in 0..basis.len() {
        let c = &m * mj.coeff(i);
        *mj.coeff_mut(i) = c;
    }
    let mut nodes = DEFAULT_NODES;
    let projector = loop {
        let pi = projector_series(&mj, epsilon, nodes)?;
        let p0 = pi.coeff(0);
        if max_abs(&(p0 * p0 - p0)) < IDEMPOTENCE_TOL || nodes >= MAX_NODES {
            break pi;
        }
        nodes *= 2;
    };
    let alpha = trace_series(&mj.mul(&projector));
    let v0m = DMatrix::from_column_slice(n, 1, v0.as_slice());
    let field = projector.mul(&MatSeries::constant(&basis, v0m));
    Ok(AmeField {
        p: p.to_vec(),
        v0,
        m,
        epsilon,
        nodes,
        order: k,
        mj,
        projector,
        alpha,
        field,
        trivial: false,
    })
}

/// `Π(z)` as a series: trapezoidal quadrature of the resolvent series
/// `(ζ − A(z))⁻¹ = Σ_j (R₀ A₁(z))^j R₀` with `R₀ = (ζ − A(p))⁻¹`.
fn projector_series(a: &MatSeries, radius: f64, nodes: usize) -> Result<MatSeries> {
    let basis = a.basis().clone();
    let n = a.nrows();
    let k = basis.order();
    let a0 = a.coeff(0).clone();
    check_contour(&a0, Complex64::new(0.0, 0.0), radius)?;
    let mut a1 = a.clone();
    *a1.coeff_mut(0) = DMatrix::zeros(n, n);
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut out = MatSeries::zero(&basis, n, n);
    for node in 0..nodes {
        let (zeta, w) = contour_node(Complex64::new(0.0, 0.0), radius, node, nodes);
        let r0 = (&id * zeta - &a0)
            .try_inverse()
            .ok_or(Error::NearContour { distance: 0.0 })?;
        let r0s = MatSeries::constant(&basis, r0);
        let step = r0s.mul(&a1);
        let mut term = r0s.clone();
        let mut res = r0s;
        for _ in 0..k {
            term = step.mul(&term);
            res = res.add(&term);
        }
        out.add_scaled_assign(&res, w);
    }
    Ok(out)
}

fn trace_series(s: &MatSeries) -> MatSeries {
    let basis = s.basis().clone();
    let mut out = MatSeries::zero(&basis, 1, 1);
    for i in 0..basis.len() {
        out.coeff_mut(i)[(0, 0)] = s.coeff(i).trace();
    }
    out
}

impl AmeField {
    pub fn n(&self) -> usize {
        self.p.len()
    }

    /// Exact projector at `z` by direct quadrature of `(ζ − M J(z))⁻¹`.
    pub fn projector_at(&self, map: &PolyMap, z: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let n = self.n();
        if self.trivial {
            return Ok(DMatrix::identity(n, n));
        }
        let a = &self.m * map.jacobian_at(z);
        super::projector::resolvent_projector(&a, Complex64::new(0.0, 0.0), self.epsilon, self.nodes)
    }

    /// `X(z) = Π(z) v₀` evaluated without truncation.
    pub fn field_at(&self, map: &PolyMap, z: &[Complex64]) -> Result<DVector<Complex64>> {
        if self.trivial {
            return Ok(self.v0.clone());
        }
        Ok(self.projector_at(map, z)? * &self.v0)
    }

    /// Max coefficient of `M J Π − α Π` through the jet order.
    pub fn holomorphic_projection_residual(&self) -> f64 {
        let n = self.n();
        let lhs = self.mj.mul(&self.projector);
        let basis = self.projector.basis().clone();
        let mut alpha_id = MatSeries::zero(&basis, n, n);
        for i in 0..basis.len() {
            *alpha_id.coeff_mut(i) = DMatrix::identity(n, n) * self.alpha.coeff(i)[(0, 0)];
        }
        let rhs = alpha_id.mul(&self.projector);
        lhs.sub(&rhs).max_abs()
    }

    /// Max coefficient of `Π² − Π` through the jet order.
    pub fn idempotence_residual(&self) -> f64 {
        self.projector.mul(&self.projector).sub(&self.projector).max_abs()
    }
}

/// Measured AME comparability on a ball around `p`.
#[derive(Clone, Debug, Serialize)]
pub struct AmeRatioReport {
    pub radius: f64,
    pub samples: usize,
    /// `max (H X, X) / λ₁`
    pub max_ratio: f64,
    /// `min (H X, X) / (λ₁ |X|²)`, which must be at least 1.
    pub min_variational_ratio: f64,
    pub skipped: usize,
}

/// Samples `(H(z) X(z), X(z)) / λ₁(z)` on the ball `|z − p| < radius`.
pub fn ame_ratio(
    field: &AmeField,
    map: &PolyMap,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<AmeRatioReport> {
    use rand::{Rng, SeedableRng};
    let n = field.n();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut min_var = f64::INFINITY;
    let mut skipped = 0;
    for _ in 0..samples {
        let dir = random_sphere_point(&mut rng, n);
        let rad = radius * rng.random::<f64>().powf(1.0 / (2.0 * n as f64));
        let z: Vec<Complex64> = field.p.iter().zip(&dir).map(|(p, d)| p + d * rad).collect();
        let spec = levi_form(map, &z)?;
        let lam1 = spec.min();
        let hnorm = spec.eigenvalues[n - 1];
        if lam1 <= 1e-13 * hnorm {
            skipped += 1;
            continue;
        }
        let x = field.field_at(map, &z)?;
        let hx = &spec.matrix * &x;
        let q = x.dotc(&hx).re;
        max_ratio = max_ratio.max(q / lam1);
        min_var = min_var.min(q / (lam1 * x.norm_squared()));
    }
    Ok(AmeRatioReport {
        radius,
        samples,
        max_ratio,
        min_variational_ratio: min_var,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MultiPoly;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn decoupled() -> PolyMap {
        PolyMap::new(
            2,
            vec![
                MultiPoly::variable(2, 0),
                MultiPoly::monomial(vec![0, 2], c(1.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn decoupled_field_is_e2() {
        let f = decoupled();
        let ame = ame_field(&f, &[c(1.0), c(0.0)], 4).unwrap();
        assert!(!ame.trivial);
        assert!((ame.v0[1].norm() - 1.0).abs() < 1e-12);
        // α(z) = 2 z₂
        let b = ame.alpha.basis().clone();
        let i = b.index_of(&[0, 1]).unwrap();
        assert!((ame.alpha.coeff(i)[(0, 0)] - c(2.0)).norm() < 1e-10);
        assert!(ame.alpha.coeff(0)[(0, 0)].norm() < 1e-12);
        let z = [c(1.02), Complex64::new(0.01, 0.03)];
        let x = ame.field_at(&f, &z).unwrap();
        assert!(x[0].norm() < 1e-10);
        assert!(ame.holomorphic_projection_residual() < 1e-10);
    }

    #[test]
    fn invertible_jacobian_gives_trivial_field() {
        let f = PolyMap::identity(2);
        let ame = ame_field(&f, &[c(1.0), c(0.0)], 3).unwrap();
        assert!(ame.trivial);
    }

    #[test]
    fn double_kernel_rejected() {
        let f = PolyMap::diagonal_power(3, 2);
        assert!(matches!(
            ame_field(&f, &[c(0.0), c(0.0), c(1.0)], 3),
            Err(Error::Hypothesis { .. })
        ));
    }
}
