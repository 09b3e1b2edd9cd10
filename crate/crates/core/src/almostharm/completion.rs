use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::potential::{five_point_laplacian, newtonian_potential_scaled, PlanarField};
use crate::error::{Error, Result};
use crate::gaplab::DiscGrid;

/// Normal-equation residual the conjugate solve must reach.
pub const CONJUGATE_SOLVE_TOL: f64 = 1e-8;

/// `G` with `φ = Re G + b*Γ` on a disc, plus the measured constants.
#[derive(Clone, Debug)]
pub struct HolomorphicCompletion {
    pub g: PlanarField<Complex64>,
    /// `b*Γ` with the kernel normalized to the disc radius.
    pub potential: PlanarField,
    pub report: CompletionReport,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CompletionReport {
    /// `sup |φ − Re G|`.
    pub deviation: f64,
    /// Measured `C = r² sup |Δφ|`.
    pub curvature: f64,
    /// `deviation / C` (0 when `C = 0`).
    pub deviation_constant: f64,
    /// `r sup |G'|` over the half-radius disc.
    pub gradient: f64,
    /// `gradient / (sup|φ| + C)`.
    pub gradient_constant: f64,
    /// Relative least-squares defect of the discrete Cauchy-Riemann system.
    pub cr_defect: f64,
    /// Relative residual of the normal equations.
    pub solver_residual: f64,
}

/// Discrete Laplacian, copied inward from the nearest full stencil at the rim.
pub fn rim_extended_laplacian(grid: &DiscGrid, f: &[f64]) -> Vec<f64> {
    let lap = five_point_laplacian(grid, f);
    let n = grid.n as isize;
    (0..grid.len())
        .map(|k| {
            if let Some(v) = lap[k] {
                return v;
            }
            let (mut i, mut j) = grid.lattice(k);
            loop {
                // step toward the middle of the lattice
                let (ci, cj) = (2 * i as isize + 1 - n, 2 * j as isize + 1 - n);
                if ci.abs() >= cj.abs() {
                    i = (i as isize - ci.signum()) as usize;
                } else {
                    j = (j as isize - cj.signum()) as usize;
                }
                if let Some(q) = grid.at(i as isize, j as isize) {
                    if let Some(v) = lap[q] {
                        return v;
                    }
                }
            }
        })
        .collect()
}

/// Holomorphic completion using the discrete Laplacian of `φ`.
pub fn holomorphic_completion(phi: &PlanarField, c_bound: f64) -> Result<HolomorphicCompletion> {
    phi.check_finite()?;
    let b = rim_extended_laplacian(&phi.grid, &phi.values);
    holomorphic_completion_with(phi, &b, c_bound)
}

/// Holomorphic completion with a supplied Laplacian `b = Δφ`.
///
/// `Re G = φ − b*Γ`, and `Im G` is its harmonic conjugate from a
/// least-squares solve of the Cauchy-Riemann equations on grid edges,
/// normalized so that `Im G(0) = 0`.
pub fn holomorphic_completion_with(phi: &PlanarField, b: &[f64], c_bound: f64) -> Result<HolomorphicCompletion> {
    let grid = &phi.grid;
    phi.check_finite()?;
    if b.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: b.len(),
        });
    }
    let r = grid.radius;
    let limit = c_bound / (r * r) * (1.0 + 1e-12);
    if let Some(k) = b.iter().position(|v| !(v.abs() <= limit)) {
        return Err(Error::hypothesis_at(
            format!(
                "|Δφ| = {:.3e} exceeds C/r² = {:.3e}",
                b[k].abs(),
                c_bound / (r * r)
            ),
            vec![grid.point(k)],
        ));
    }
    let density = PlanarField::new(grid.clone(), b.to_vec())?;
    let potential = newtonian_potential_scaled(&density, r)?;
    let u: Vec<f64> = phi
        .values
        .iter()
        .zip(&potential.values)
        .map(|(f, p)| f - p)
        .collect();
    let (mut v, cr_defect, solver_residual) = harmonic_conjugate(grid, &u)?;
    let v0 = center_mean(grid, &v);
    for x in &mut v {
        *x -= v0;
    }
    let g: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| Complex64::new(*a, *b)).collect();

    let deviation = potential.sup();
    let curvature = b.iter().fold(0.0f64, |m, x| m.max(x.abs())) * r * r;
    let gradient = r * half_disc_derivative_sup(grid, &g);
    let report = CompletionReport {
        deviation,
        curvature,
        deviation_constant: if curvature > 0.0 { deviation / curvature } else { 0.0 },
        gradient,
        gradient_constant: gradient / (phi.sup() + curvature).max(f64::MIN_POSITIVE),
        cr_defect,
        solver_residual,
    };
    Ok(HolomorphicCompletion {
        g: PlanarField::new(grid.clone(), g)?,
        potential,
        report,
    })
}

/// Mean over the cells within one step of the center; a mean-value estimate
/// of the value at the center for harmonic data.
pub(crate) fn center_mean<T>(grid: &DiscGrid, f: &[T]) -> T
where
    T: Copy + std::iter::Sum<T> + std::ops::Div<f64, Output = T>,
{
    let ks: Vec<usize> = (0..grid.len())
        .filter(|&k| grid.offset(k).norm() <= grid.h * 1.0001)
        .collect();
    ks.iter().map(|&k| f[k]).sum::<T>() / ks.len() as f64
}

/// `sup |G'|` on `D(center, r/2)` with `G' = ∂G/∂x` by centered differences.
pub(crate) fn half_disc_derivative_sup(grid: &DiscGrid, g: &[Complex64]) -> f64 {
    derivative_on_half_disc(grid, g)
        .into_iter()
        .fold(0.0, |m, (_, d)| m.max(d.norm()))
}

pub(crate) fn derivative_on_half_disc(grid: &DiscGrid, g: &[Complex64]) -> Vec<(usize, Complex64)> {
    (0..grid.len())
        .filter(|&k| grid.offset(k).norm() < 0.5 * grid.radius)
        .filter_map(|k| match grid.neighbors(k, 0) {
            (Some(a), Some(b)) => Some((k, (g[b] - g[a]) / (2.0 * grid.h))),
            _ => None,
        })
        .collect()
}

fn partial(grid: &DiscGrid, u: &[f64], k: usize, axis: usize) -> f64 {
    let h = grid.h;
    match grid.neighbors(k, axis) {
        (Some(a), Some(b)) => (u[b] - u[a]) / (2.0 * h),
        (None, Some(b)) => (u[b] - u[k]) / h,
        (Some(a), None) => (u[k] - u[a]) / h,
        (None, None) => 0.0,
    }
}

/// Least-squares solution of `∇v = (−u_y, u_x)` on grid edges. Returns `v`,
/// the relative defect and the relative normal-equation residual.
fn harmonic_conjugate(grid: &DiscGrid, u: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let m = grid.len();
    let h = grid.h;
    let ux: Vec<f64> = (0..m).map(|k| partial(grid, u, k, 0)).collect();
    let uy: Vec<f64> = (0..m).map(|k| partial(grid, u, k, 1)).collect();
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * m);
    for k in 0..m {
        if let (_, Some(q)) = grid.neighbors(k, 0) {
            edges.push((k, q, -h * 0.5 * (uy[k] + uy[q])));
        }
        if let (_, Some(q)) = grid.neighbors(k, 1) {
            edges.push((k, q, h * 0.5 * (ux[k] + ux[q])));
        }
    }
    // pin the cell nearest the center
    let pin = (0..m)
        .min_by(|&a, &b| grid.offset(a).norm().total_cmp(&grid.offset(b).norm()))
        .unwrap_or(0);
    let red = |k: usize| -> Option<usize> {
        match k.cmp(&pin) {
            std::cmp::Ordering::Less => Some(k),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(k - 1),
        }
    };
    let mut diag = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    let mut trip = Vec::with_capacity(3 * edges.len());
    for &(a, b, t) in &edges {
        diag[a] += 1.0;
        diag[b] += 1.0;
        rhs[b] += t;
        rhs[a] -= t;
        if let (Some(ra), Some(rb)) = (red(a), red(b)) {
            trip.push(Triplet::new(ra, rb, -1.0));
            trip.push(Triplet::new(rb, ra, -1.0));
        }
    }
    for k in 0..m {
        if let Some(rk) = red(k) {
            trip.push(Triplet::new(rk, rk, diag[k]));
        }
    }
    let l = SparseColMat::<usize, f64>::try_new_from_triplets(m - 1, m - 1, &trip)
        .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
    let llt = l
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Cholesky factorization failed: {e:?}")))?;
    let rr: Vec<f64> = (0..m).filter(|&k| k != pin).map(|k| rhs[k]).collect();
    let sol = llt.solve(&Mat::<f64>::from_fn(m - 1, 1, |i, _| rr[i]));
    let mut v = vec![0.0; m];
    for k in 0..m {
        if let Some(rk) = red(k) {
            v[k] = sol[(rk, 0)];
        }
    }
    // normal-equation residual on the reduced system
    let mut lv = vec![0.0; m];
    for &(a, b, _) in &edges {
        let d = v[b] - v[a];
        lv[b] += d;
        lv[a] -= d;
    }
    let num: f64 = (0..m)
        .filter(|&k| k != pin)
        .map(|k| (lv[k] - rhs[k]).powi(2))
        .sum::<f64>()
        .sqrt();
    let den: f64 = rr.iter().map(|x| x * x).sum::<f64>().sqrt();
    let solver_residual = if den > 0.0 { num / den } else { num };
    if !(solver_residual < CONJUGATE_SOLVE_TOL) {
        return Err(Error::Numerical(format!(
            "harmonic conjugate solve residual {solver_residual:.2e}"
        )));
    }
    let (mut dnum, mut dden) = (0.0, 0.0);
    for &(a, b, t) in &edges {
        dnum += (v[b] - v[a] - t).powi(2);
        dden += t * t;
    }
    let cr_defect = if dden > 0.0 { (dnum / dden).sqrt() } else { dnum.sqrt() };
    Ok((v, cr_defect, solver_residual))
}

/// Both sides of the gradient estimate for `F(ζ) = Σ c_k ((ζ − z)/r)^k`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GradientEstimate {
    /// `sup |F'|` over `D(z, r/2)`.
    pub derivative_sup: f64,
    /// `‖Re F‖` in `L²(D(z, r))`.
    pub real_l2: f64,
    /// `derivative_sup / (r⁻² real_l2)`, 0 when `F' ≡ 0`.
    pub ratio: f64,
}

pub fn gradient_estimate_check(coeffs: &[Complex64], z: Complex64, r: f64, n: usize) -> Result<GradientEstimate> {
    let grid = DiscGrid::new(z, r, n)?;
    let eval = |w: Complex64| -> (Complex64, Complex64) {
        let x = w / r;
        let (mut f, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for c in coeffs.iter().rev() {
            d = d * x + f;
            f = f * x + c;
        }
        (f, d / r)
    };
    let mut derivative_sup: f64 = 0.0;
    let mut l2 = 0.0;
    for k in 0..grid.len() {
        let w = grid.offset(k);
        let (f, d) = eval(w);
        l2 += f.re * f.re;
        if w.norm() < 0.5 * r {
            derivative_sup = derivative_sup.max(d.norm());
        }
    }
    let real_l2 = (l2 * grid.h * grid.h).sqrt();
    let ratio = if derivative_sup == 0.0 {
        0.0
    } else {
        derivative_sup * r * r / real_l2
    };
    Ok(GradientEstimate {
        derivative_sup,
        real_l2,
        ratio,
    })
}

/// Largest ratio over random polynomials of degree `1..=max_degree` and the
/// given radii, centered at random points.
pub fn gradient_estimate_sweep(max_degree: usize, count: usize, radii: &[f64], n: usize, seed: u64) -> Result<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let deg = 1 + i % max_degree;
        let coeffs: Vec<Complex64> = (0..=deg)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let zr: f64 = StandardNormal.sample(&mut rng);
        let zi: f64 = StandardNormal.sample(&mut rng);
        for &r in radii {
            let e = gradient_estimate_check(&coeffs, Complex64::new(zr, zi), r, n)?;
            worst = worst.max(e.ratio);
        }
    }
    Ok(worst)
}
