use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::leviform::KERNEL_TOL;
use crate::linalg::{kernel_dimension, svd_sorted};
use crate::polyalg::{random_sphere_point, MultiPoly, PolyMap};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `det J` together with its gradient and Hessian, for work on the
/// critical locus.
#[derive(Clone, Debug)]
pub struct CriticalLocus {
    pub det: MultiPoly,
    pub grad: Vec<MultiPoly>,
    pub hessian: Vec<Vec<MultiPoly>>,
    scale: f64,
}

impl CriticalLocus {
    pub fn new(map: &PolyMap) -> Result<Self> {
        let det = map.det_jacobian()?;
        let n = map.n();
        let grad: Vec<MultiPoly> = (0..n).map(|i| det.derivative(i)).collect();
        let hessian = grad
            .iter()
            .map(|g| (0..n).map(|j| g.derivative(j)).collect())
            .collect();
        let scale = det.terms().map(|(_, c)| c.norm()).sum::<f64>();
        Ok(CriticalLocus {
            det,
            grad,
            hessian,
            scale,
        })
    }

    /// True when `det J` vanishes identically (every point is critical).
    pub fn is_everything(&self) -> bool {
        self.det.is_zero()
    }

    /// True when `det J` is a nonzero constant, or vanishes only at 0.
    pub fn is_trivial(&self) -> bool {
        self.det.degree().is_none_or(|d| d == 0)
    }

    pub fn det_at(&self, z: &[Complex64]) -> Complex64 {
        self.det.eval(z)
    }

    fn grad_at(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.grad.iter().map(|g| g.eval(z)).collect()
    }

    /// Newton projection of a sphere point onto `det J = 0`, staying on the
    /// sphere (the locus is a cone).
    pub fn project(&self, start: &[Complex64]) -> Option<Vec<Complex64>> {
        let mut z = normalize(start);
        for _ in 0..300 {
            let g = self.det_at(&z);
            if g.norm() <= 1e-15 * self.scale {
                return Some(z);
            }
            let grad = self.grad_at(&z);
            let gn: f64 = grad.iter().map(|v| v.norm_sqr()).sum();
            if gn <= 1e-300 {
                return None;
            }
            // minimal-norm solution of ∇g · δ = −g
            let step: Vec<Complex64> = grad.iter().map(|d| -g * d.conj() / gn).collect();
            let len = step.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for (zi, s) in z.iter_mut().zip(&step) {
                *zi += s;
            }
            z = normalize(&z);
            if len < 1e-15 {
                break;
            }
        }
        (self.det_at(&z).norm() <= 1e-10 * self.scale).then_some(z)
    }

    /// Gauss-Newton on `∇(det J) = 0` in the affine chart of the largest
    /// coordinate; these are the singular points of the critical locus.
    pub fn singular_point_from(&self, start: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = start.len();
        let i0 = argmax(start);
        let mut z: Vec<Complex64> = start.iter().map(|v| v / start[i0]).collect();
        let gscale = self
            .grad
            .iter()
            .flat_map(|g| g.terms().map(|(_, c)| *c))
            .map(|c| c.norm())
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);
        for _ in 0..100 {
            let r = DVector::from_vec(self.grad_at(&z));
            if r.norm() <= 1e-12 * gscale {
                break;
            }
            let cols: Vec<usize> = (0..n).filter(|&j| j != i0).collect();
            let jac = DMatrix::from_fn(n, cols.len(), |i, c| self.hessian[i][cols[c]].eval(&z));
            let step = jac.svd(true, true).solve(&(-&r), 1e-12).ok()?;
            for (c, &j) in cols.iter().enumerate() {
                z[j] += step[c];
            }
            if z.iter().any(|v| !v.re.is_finite() || v.norm() > 1e8) {
                return None;
            }
        }
        let r: f64 = self.grad_at(&z).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        (r <= 1e-10 * gscale).then(|| canonical(&z))
    }
}

/// All `(n−1)`-minors of `J(z)`; they vanish exactly where `dim ker J ≥ 2`.
fn minors(map: &PolyMap, z: &[Complex64]) -> Vec<Complex64> {
    let j = map.jacobian_at(z);
    let n = j.nrows();
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let sub = j.clone().remove_row(r).remove_column(c);
            out.push(sub.determinant());
        }
    }
    out
}

/// Gauss-Newton on the minors of `J` in the affine chart of the largest
/// coordinate, from a point of the critical locus.
///
/// When `det J` has repeated factors its gradient vanishes on the whole
/// locus, so corank-two points are not singular points of `∇ det J = 0` in
/// any useful sense and have to be looked for directly. A result is only
/// returned after the kernel dimension is confirmed by SVD.
pub(crate) fn corank_two_from(map: &PolyMap, start: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = start.len();
    if n < 2 {
        return None;
    }
    let i0 = argmax(start);
    let mut z: Vec<Complex64> = start.iter().map(|v| v / start[i0]).collect();
    let cols: Vec<usize> = (0..n).filter(|&j| j != i0).collect();
    let scale = crate::linalg::max_abs(&map.jacobian_at(&z)).powi(n as i32 - 1).max(f64::MIN_POSITIVE);
    let h = 1e-7;
    for _ in 0..200 {
        let r = DVector::from_vec(minors(map, &z));
        if r.norm() <= 1e-15 * scale {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), cols.len());
        for (c, &j) in cols.iter().enumerate() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[j] += h;
            zm[j] -= h;
            let (fp, fm) = (minors(map, &zp), minors(map, &zm));
            for i in 0..r.len() {
                jac[(i, c)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let step = jac.svd(true, true).solve(&(-&r), 1e-14).ok()?;
        for (c, &j) in cols.iter().enumerate() {
            z[j] += step[c];
        }
        if z.iter().any(|v| !v.re.is_finite() || v.norm() > 1e8) {
            return None;
        }
        if step.norm() < 1e-16 {
            break;
        }
    }
    let p = canonical(&z);
    (kernel_dimension(&map.jacobian_at(&p), KERNEL_TOL) >= 2).then_some(p)
}

pub(crate) fn normalize(z: &[Complex64]) -> Vec<Complex64> {
    let r = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    z.iter().map(|v| v / r).collect()
}

pub(crate) fn argmax(z: &[Complex64]) -> usize {
    (0..z.len())
        .max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm()))
        .unwrap_or(0)
}

/// Unit representative with the largest coordinate real and positive, so
/// points of the same complex line compare equal.
pub fn canonical(z: &[Complex64]) -> Vec<Complex64> {
    let z = normalize(z);
    let i0 = argmax(&z);
    let phase = z[i0].conj() / z[i0].norm();
    z.iter().map(|v| v * phase).collect()
}

pub(crate) fn same_line(a: &[Complex64], b: &[Complex64]) -> bool {
    let (a, b) = (canonical(a), canonical(b));
    a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() < 1e-6
}

/// `dim ker dF̃` at `π(p)`, computed in affine charts of source and target.
pub fn projective_kernel_dimension(map: &PolyMap, p: &[Complex64]) -> Result<usize> {
    let n = map.n();
    if n < 2 {
        return Ok(0);
    }
    let i0 = argmax(p);
    if p[i0] == ZERO {
        return Err(Error::InvalidInput("the origin has no projective image".into()));
    }
    let z: Vec<Complex64> = p.iter().map(|v| v / p[i0]).collect();
    let f = map.evaluate(&z)?;
    let m0 = argmax(&f);
    let jac = map.jacobian_at(&z);
    let src: Vec<usize> = (0..n).filter(|&j| j != i0).collect();
    let dst: Vec<usize> = (0..n).filter(|&m| m != m0).collect();
    let f0 = f[m0];
    let d = DMatrix::from_fn(dst.len(), src.len(), |r, c| {
        let (m, j) = (dst[r], src[c]);
        (jac[(m, j)] * f0 - f[m] * jac[(m0, j)]) / (f0 * f0)
    });
    Ok(kernel_dimension(&d, KERNEL_TOL))
}

/// Sampling certificate for `dim ker J ≤ 1` on the critical locus.
#[derive(Clone, Debug, Serialize)]
pub struct KernelCertificate {
    pub samples: usize,
    /// Locus points reached by Newton projection.
    pub locus_points: usize,
    pub max_kernel_dim: usize,
    /// Points where the maximum was attained.
    pub witnesses: Vec<Vec<Complex64>>,
    /// Singular points of the critical locus found along the way.
    pub singular_points: Vec<Vec<Complex64>>,
    /// Set when the map is an immersion off the origin.
    pub no_critical_points: bool,
    pub pass: bool,
    #[serde(skip)]
    pub locus: Vec<Vec<Complex64>>,
}

/// Samples the critical locus `{det J = 0}` on the unit sphere and reports the
/// largest kernel dimension of `J` seen there.
///
/// Points come from Newton projection of random sphere points, plus the
/// singular points of the locus and the zeros of the `(n−1)`-minors reached
/// by Gauss-Newton from those. Kernel dimension two or more can only occur
/// at singular points, which is why they are searched explicitly. The result
/// is still a sampling heuristic.
pub fn critical_kernel_certificate(map: &PolyMap, samples: usize, seed: u64) -> Result<KernelCertificate> {
    if !map.is_square() {
        return Err(Error::InvalidInput("kernel certificate needs a square map".into()));
    }
    if map.homogeneous_degree().or(map.infer_homogeneous_degree()).is_none() {
        return Err(Error::NotHomogeneous("kernel certificate needs a homogeneous map".into()));
    }
    let n = map.n();
    let crit = CriticalLocus::new(map)?;
    if crit.is_everything() {
        return Err(Error::hypothesis("det J vanishes identically"));
    }
    if crit.is_trivial() || n < 2 {
        return Ok(KernelCertificate {
            samples,
            locus_points: 0,
            max_kernel_dim: 0,
            witnesses: vec![],
            singular_points: vec![],
            no_critical_points: true,
            pass: true,
            locus: vec![],
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut locus = Vec::new();
    let mut singular: Vec<Vec<Complex64>> = Vec::new();
    for _ in 0..samples {
        let start = random_sphere_point(&mut rng, n);
        let Some(z) = crit.project(&start) else { continue };
        for s in crit.singular_point_from(&z).into_iter().chain(corank_two_from(map, &z)) {
            if !singular.iter().any(|q| same_line(q, &s)) {
                singular.push(s);
            }
        }
        locus.push(z);
    }
    let mut max_dim = 0;
    let mut witnesses: Vec<Vec<Complex64>> = Vec::new();
    for z in locus.iter().chain(&singular) {
        let dim = kernel_dimension(&map.jacobian_at(z), KERNEL_TOL);
        if dim > max_dim {
            max_dim = dim;
            witnesses.clear();
        }
        if dim == max_dim && witnesses.len() < 16 && !witnesses.iter().any(|w| same_line(w, z)) {
            witnesses.push(z.clone());
        }
    }
    let no_critical_points = locus.is_empty() && singular.is_empty();
    Ok(KernelCertificate {
        samples,
        locus_points: locus.len(),
        max_kernel_dim: max_dim,
        witnesses,
        singular_points: singular,
        no_critical_points,
        pass: max_dim <= 1,
        locus,
    })
}

/// Kernel and cokernel vectors of a corank-one matrix.
pub(crate) fn null_vectors(j: &DMatrix<Complex64>) -> (DVector<Complex64>, DVector<Complex64>) {
    let n = j.nrows();
    let svd = svd_sorted(j);
    (svd.v.column(n - 1).into_owned(), svd.u.column(n - 1).into_owned())
}
