use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::assemble::WeightedFormAssembly;
use super::gap::{min_gap, GapResult};
use super::grid::DiscGrid;
use super::weight::{Dilated, Flat, RadialPower, Weight};
use crate::error::{Error, Result};
use crate::linalg::horner;
use crate::rootgeom::sublevel_decomposition;

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

/// Relative error of the dilation identity `E^φ(w) = R² E^{φ_R}(Dil_R w)`.
///
/// Both sides use the same discrete form with `V = 2λ₁ = Δφ/2`; the second
/// grid is the first one scaled by `R`, so the identity holds up to roundoff.
pub fn scaling_check(
    weight: &dyn Weight,
    w: &dyn Fn(Complex64) -> Complex64,
    r: f64,
    n: usize,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput("dilation factor must be positive".into()));
    }
    let g1 = DiscGrid::unit(n)?;
    let v1 = g1.sample(|z| 0.5 * weight.laplacian(z));
    let w1 = g1.sample(w);
    let a1 = WeightedFormAssembly::from_weight(g1, weight, v1)?;
    let lhs = a1.energy_w(&w1);

    let scaled = Dilated { inner: weight, r };
    let g2 = DiscGrid::new(ORIGIN, r, n)?;
    let v2 = g2.sample(|z| 0.5 * scaled.laplacian(z));
    let w2 = g2.sample(|z| w(z / r) / r);
    let a2 = WeightedFormAssembly::from_weight(g2, &scaled, v2)?;
    let rhs = r * r * a2.energy_w(&w2);
    Ok(if lhs == 0.0 { rhs.abs() } else { (lhs - rhs).abs() / lhs.abs() })
}

/// Gap of the radial model `φ = A²|ζ|^{2d+2}`, `V = Δφ` on the unit disc.
pub fn radial_model_gap(d: u32, a: f64, n: usize) -> Result<GapResult> {
    let grid = DiscGrid::unit(n)?;
    let weight = RadialPower::new(a * a, d + 1);
    let v = grid.sample(|z| weight.laplacian(z));
    let asm = WeightedFormAssembly::from_weight(grid, &weight, v)?;
    min_gap(&asm)
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessPoint {
    pub d: u32,
    pub a: f64,
    pub n: usize,
    pub gap: f64,
    /// `gap / A^{2/(d+1)}`
    pub ratio: f64,
    /// `gap · h²` exceeds [`SATURATION`]; the value is not grid-resolved.
    pub saturated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpnessScan {
    pub points: Vec<SharpnessPoint>,
    pub slope: f64,
    pub expected: f64,
}

impl SharpnessScan {
    pub fn saturated(&self) -> usize {
        self.points.iter().filter(|p| p.saturated).count()
    }

    /// CSV rows `d,A,N,gap,ratio,saturated,slope_fit`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,A,N,gap,ratio,saturated,slope_fit\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{:e},{},{:e},{:e},{},{}\n",
                p.d, p.a, p.n, p.gap, p.ratio, p.saturated, self.slope
            ));
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// A gap above `SATURATION / h²` means the minimizer's length scale
/// `1/√gap` is below two grid spacings, so the grid no longer resolves it.
pub const SATURATION: f64 = 0.25;

/// Fits the exponent of `gap ~ A^s` for the radial model of degree `d`.
/// Points beyond grid resolution are kept in the fit and flagged.
pub fn sharpness_scan(d: u32, a_values: &[f64], n: usize) -> Result<SharpnessScan> {
    if a_values.len() < 4 {
        return Err(Error::InvalidInput("need at least four A values".into()));
    }
    if a_values.iter().any(|a| !(*a > 0.0)) {
        return Err(Error::InvalidInput("A values must be positive".into()));
    }
    let results: Vec<Result<GapResult>> = a_values
        .par_iter()
        .map(|&a| radial_model_gap(d, a, n))
        .collect();
    let expected = 2.0 / (d as f64 + 1.0);
    let mut points = Vec::new();
    for (&a, r) in a_values.iter().zip(results) {
        let r = r?;
        let h = 2.0 / n as f64;
        points.push(SharpnessPoint {
            d,
            a,
            n,
            gap: r.gap,
            ratio: r.gap / a.powf(expected),
            saturated: r.gap * h * h > SATURATION,
        });
    }
    let lx: Vec<f64> = points.iter().map(|p| p.a.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.gap.ln()).collect();
    Ok(SharpnessScan {
        slope: fit_slope(&lx, &ly),
        expected,
        points,
    })
}

/// Gap of the basic uncertainty setup: `φ = 0`, `V = c` on the annulus
/// `r/2 ≤ |z − center| < r` and zero inside.
pub fn dbar_up_gap(center: Complex64, c: f64, r: f64, n: usize) -> Result<GapResult> {
    let grid = DiscGrid::new(center, r, n)?;
    let v = grid.sample(|z| if (z - center).norm() >= 0.5 * r { c } else { 0.0 });
    let asm = WeightedFormAssembly::from_weight(grid, &Flat, v)?;
    min_gap(&asm)
}

#[derive(Clone, Debug, Serialize)]
pub struct DbarUpCase {
    pub c: f64,
    pub r: f64,
    pub gap: f64,
    pub gap_refined: f64,
    /// `gap / min{c, 1/r²}`
    pub kappa: f64,
    pub refinement_change: f64,
}

/// Runs the uncertainty setup at `N` and `2N` for every `(c, r)` pair.
pub fn dbar_up_sweep(cs: &[f64], rs: &[f64], n: usize) -> Result<Vec<DbarUpCase>> {
    let pairs: Vec<(f64, f64)> = cs.iter().flat_map(|&c| rs.iter().map(move |&r| (c, r))).collect();
    pairs
        .par_iter()
        .map(|&(c, r)| {
            let g1 = dbar_up_gap(ORIGIN, c, r, n)?.gap;
            let g2 = dbar_up_gap(ORIGIN, c, r, 2 * n)?.gap;
            Ok(DbarUpCase {
                c,
                r,
                gap: g1,
                gap_refined: g2,
                kappa: g2 / c.min(1.0 / (r * r)),
                refinement_change: (g2 - g1).abs() / g2.abs(),
            })
        })
        .collect()
}

/// Outcome of the general one-dimensional estimate on the unit disc.
#[derive(Clone, Debug, Serialize)]
pub struct Gap1dReport {
    pub degree: usize,
    pub leading_modulus: f64,
    pub gap: f64,
    /// `gap / A^{2/(d+1)}`
    pub ratio: f64,
    pub kappa: f64,
    pub pass: bool,
    /// Extreme values of `Δφ / |P|²` seen on the grid.
    pub comparability: [f64; 2],
}

/// Weight for [`gap_1d_general`]: analytic, or sampled on the grid.
pub enum PhiSource<'a> {
    Analytic(&'a dyn Weight),
    Sampled(Vec<f64>),
}

/// Gap of `∫|∂̄w|²e^{−2φ} + ∫|P|²|w|²e^{−2φ}` on the unit disc, with
/// `B⁻¹|P|² ≤ Δφ ≤ B|P|²` checked on the grid first.
///
/// For sampled weights the Laplacian is the five-point stencil, checked only
/// where all four neighbors are active and `|P|²` is not negligible.
pub fn gap_1d_general(p: &[Complex64], b: f64, phi: PhiSource, n: usize, kappa: f64) -> Result<Gap1dReport> {
    if !(b >= 1.0) {
        return Err(Error::InvalidInput("comparability constant must be at least 1".into()));
    }
    let degree = p
        .iter()
        .rposition(|c| *c != ORIGIN)
        .ok_or_else(|| Error::InvalidInput("P is identically zero".into()))?;
    if degree > 0 {
        sublevel_decomposition(&p[..=degree])?;
    }
    let lead = p[degree].norm();
    let grid = DiscGrid::unit(n)?;
    let v = grid.sample(|z| horner(p, z).norm_sqr());
    let (lap, asm) = match phi {
        PhiSource::Analytic(w) => {
            let lap = grid.sample(|z| Some(w.laplacian(z)));
            (lap, WeightedFormAssembly::from_weight(grid, w, v.clone())?)
        }
        PhiSource::Sampled(vals) => {
            let h2 = grid.h * grid.h;
            let lap = (0..grid.len())
                .map(|k| {
                    let (xm, xp) = grid.neighbors(k, 0);
                    let (ym, yp) = grid.neighbors(k, 1);
                    Some((vals[xm?] + vals[xp?] + vals[ym?] + vals[yp?] - 4.0 * vals[k]) / h2)
                })
                .collect();
            (lap, WeightedFormAssembly::new(grid, vals, v.clone())?)
        }
    };
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (k, (l, pv)) in lap.iter().zip(&v).enumerate() {
        let Some(l) = l else { continue };
        if *pv <= 1e-6 * vmax {
            continue;
        }
        let q = l / pv;
        lo = lo.min(q);
        hi = hi.max(q);
        if q < 1.0 / b || q > b {
            return Err(Error::hypothesis_at(
                format!("Laplacian of phi is not comparable to |P|^2 (ratio {q:.4}, B = {b})"),
                vec![asm.grid.point(k)],
            ));
        }
    }
    let r = min_gap(&asm)?;
    let ratio = r.gap / lead.powf(2.0 / (degree as f64 + 1.0));
    Ok(Gap1dReport {
        degree,
        leading_modulus: lead,
        gap: r.gap,
        ratio,
        kappa,
        pass: ratio >= kappa,
        comparability: [lo, hi],
    })
}

/// `∫_𝔻|h|² / ∫_{𝔻∖½𝔻}|h|²` by grid quadrature, `h` given by coefficients.
pub fn annulus_norm_check(h: &[Complex64], n: usize) -> Result<f64> {
    let grid = DiscGrid::unit(n)?;
    let vals = grid.sample(|z| horner(h, z));
    let total: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
    let outer: f64 = (0..grid.len())
        .filter(|&k| grid.point(k).norm() >= 0.5)
        .map(|k| vals[k].norm_sqr())
        .sum();
    if outer == 0.0 {
        return Err(Error::InvalidInput("h vanishes on the annulus".into()));
    }
    Ok(total / outer)
}

/// Largest annulus ratio over `count` random polynomials of degree up to
/// `max_degree`.
pub fn annulus_sweep(max_degree: usize, count: usize, n: usize, seed: u64) -> Result<f64> {
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<Vec<Complex64>> = (0..count)
        .map(|_| {
            let d = rng.random_range(0..=max_degree);
            (0..=d)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect()
        })
        .collect();
    let ratios: Result<Vec<f64>> = polys.par_iter().map(|h| annulus_norm_check(h, n)).collect();
    Ok(ratios?.into_iter().fold(0.0, f64::max))
}

/// Discrete gap before and after the holomorphic change of trivialization
/// `φ ↦ φ + Re G`; returns both gaps.
pub fn gauge_gap_pair(
    weight: &dyn Weight,
    g: &[Complex64],
    v: &dyn Fn(Complex64) -> f64,
    n: usize,
) -> Result<(f64, f64)> {
    let grid = DiscGrid::unit(n)?;
    let vv = grid.sample(v);
    let a = WeightedFormAssembly::from_weight(grid.clone(), weight, vv.clone())?;
    let shifted = super::weight::GaugeShifted {
        inner: weight,
        g: g.to_vec(),
    };
    let b = WeightedFormAssembly::from_weight(grid, &shifted, vv)?;
    Ok((min_gap(&a)?.gap, min_gap(&b)?.gap))
}

/// Rayleigh quotients of `w` under `φ` and of `w e^{G}` under `φ + Re G`,
/// both computed by midpoint quadrature with exact `∂w/∂z̄`.
pub fn gauge_rayleigh_pair(
    weight: &dyn Weight,
    g: &[Complex64],
    v: &dyn Fn(Complex64) -> f64,
    w: &dyn Fn(Complex64) -> Complex64,
    dbar_w: &dyn Fn(Complex64) -> Complex64,
    n: usize,
) -> Result<(f64, f64)> {
    let grid = DiscGrid::unit(n)?;
    let quotient = |phi: &dyn Fn(Complex64) -> f64,
                    f: &dyn Fn(Complex64) -> Complex64,
                    df: &dyn Fn(Complex64) -> Complex64| {
        let mut num = 0.0;
        let mut den = 0.0;
        for z in grid.points() {
            let m = (-2.0 * phi(z)).exp();
            num += (df(z).norm_sqr() + v(z) * f(z).norm_sqr()) * m;
            den += f(z).norm_sqr() * m;
        }
        num / den
    };
    let q0 = quotient(&|z| weight.value(z), w, dbar_w);
    let gz = |z| horner(g, z);
    let q1 = quotient(
        &|z| weight.value(z) + gz(z).re,
        &|z| w(z) * gz(z).exp(),
        &|z| dbar_w(z) * gz(z).exp(),
    );
    Ok((q0, q1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        assert!((fit_slope(&x, &y) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn identity_scaling_is_exact() {
        let w = RadialPower::new(1.0, 2);
        let e = scaling_check(&w, &|z| (-z.norm_sqr()).exp().into(), 1.0, 64).unwrap();
        assert!(e < 1e-14);
    }

    #[test]
    fn annulus_constant() {
        let r = annulus_norm_check(&[Complex64::new(1.0, 0.0)], 256).unwrap();
        assert!((r - 4.0 / 3.0).abs() < 0.02 * 4.0 / 3.0);
    }
}
