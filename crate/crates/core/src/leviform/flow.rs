use num_complex::Complex64;
use serde::Serialize;

use super::ame::{ame_field, AmeField};
use crate::error::{Error, Result};
use crate::linalg::{poly_from_roots, poly_roots, svd_sorted};
use crate::polyalg::{compose_jet, vanishing_order, Jet, MatSeries, Order, PolyMap, VecJet};

/// Substitutes vector jets `δ(ζ)` into a column series `X(p + δ)`.
///
/// `δ` may have a nonzero constant term; the result is then the truncated
/// series re-centered at `p + δ(0)`.
pub fn compose_series(field: &MatSeries, delta: &VecJet) -> VecJet {
    let basis = field.basis();
    let n = basis.n();
    let k = delta.order();
    let max_deg = basis.order();
    let powers: Vec<Vec<Jet>> = delta
        .0
        .iter()
        .map(|d| {
            let mut p = vec![Jet::constant(k, Complex64::new(1.0, 0.0))];
            for e in 1..=max_deg {
                let next = &p[e - 1] * d;
                p.push(next);
            }
            p
        })
        .collect();
    let rows = field.nrows();
    let mut out = vec![Jet::zero(k); rows];
    for i in 0..basis.len() {
        let c = field.coeff(i);
        if c.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
            continue;
        }
        let exp = basis.exponent(i);
        let mut mono = Jet::constant(k, Complex64::new(1.0, 0.0));
        for v in 0..n {
            if exp[v] > 0 {
                mono = &mono * &powers[v][exp[v] as usize];
            }
        }
        for (r, o) in out.iter_mut().enumerate() {
            *o = &*o + &mono.scale(c[(r, 0)]);
        }
    }
    VecJet(out)
}

/// Taylor coefficients of the flow `Θ' = X(Θ)`, `Θ(0) = start`, through
/// order `k`, where `field` is the expansion of `X` at `base`.
pub fn flow_taylor_from(base: &[Complex64], field: &MatSeries, start: &[Complex64], k: usize) -> VecJet {
    let n = base.len();
    let offset: Vec<Complex64> = start.iter().zip(base).map(|(s, b)| s - b).collect();
    let mut delta = VecJet((0..n).map(|i| Jet::constant(k, offset[i])).collect());
    for step in 0..k {
        let x = compose_series(field, &delta.truncate(step));
        for i in 0..n {
            let c = x.0[i].coeff(step) / (step as f64 + 1.0);
            delta.0[i].set_coeff(step + 1, c);
        }
    }
    VecJet(
        delta
            .0
            .iter()
            .zip(base)
            .map(|(d, b)| d + &Jet::constant(k, *b))
            .collect(),
    )
}

/// Flow of `X` from its own expansion point `p`.
pub fn flow_taylor(p: &[Complex64], field: &MatSeries, k: usize) -> VecJet {
    flow_taylor_from(p, field, p, k)
}

/// Samples of the Weierstrass coefficients at a transverse point.
#[derive(Clone, Debug, Serialize)]
pub struct WeierstrassSample {
    pub point: Vec<Complex64>,
    /// `c_0, ..., c_{m-1}` of the monic polynomial with the `m` smallest roots
    /// of `ζ ↦ det J(Θ(z'; ζ))`.
    pub coefficients: Vec<Complex64>,
}

/// Local foliation by AME flow discs around `p`.
#[derive(Clone, Debug)]
pub struct FoliationChart {
    pub p: Vec<Complex64>,
    pub ball_radius: f64,
    pub order: usize,
    pub field: AmeField,
    /// Flow disc through `p`.
    pub flow: VecJet,
    /// `ζ ↦ det J(Θ(p; ζ))`.
    pub jacobian_jet: Jet,
    pub weierstrass_order: usize,
    pub samples: Vec<WeierstrassSample>,
}

/// Number of grid values per real transverse coordinate.
pub const TRANSVERSE_GRID: usize = 5;

/// Default transverse ball radius.
pub const TRANSVERSE_RADIUS: f64 = 0.05;

/// Builds the AME foliation at `p`, the Weierstrass order `m` of
/// `det J` along the leaf through `p`, and coefficient samples on a
/// transverse ball. At most `samples` transverse points are used.
pub fn foliation_prepare(map: &PolyMap, p: &[Complex64], k: usize, samples: usize) -> Result<FoliationChart> {
    let field = ame_field(map, p, k)?;
    if field.trivial {
        return Err(Error::hypothesis_at(
            "J(p) is invertible; p is not on the critical locus",
            p.to_vec(),
        ));
    }
    let n = map.n();
    let detj = PolyMap::new(n, vec![map.det_jacobian()?])?;
    let flow = flow_taylor(p, &field.field, k);
    let jacobian_jet = compose_jet(&detj, &flow, k)?.0.remove(0);
    let scale = map
        .jacobian_at(p)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .powi(n as i32)
        .max(f64::MIN_POSITIVE);
    if jacobian_jet.coeff(0).norm() > 1e-9 * scale {
        return Err(Error::Numerical(format!(
            "det J(p) = {} is not zero at a corank-one point",
            jacobian_jet.coeff(0)
        )));
    }
    let m = match vanishing_order(&VecJet(vec![jacobian_jet.clone()])) {
        Order::Finite(m) => m,
        Order::Infinite { truncation } => {
            return Err(Error::hypothesis(format!(
                "det J vanishes along the leaf through order {truncation}: \
                 case (a) suspected, increase K or check hypotheses"
            )))
        }
    };

    let svd = svd_sorted(&map.jacobian_at(p));
    // Columns 0..n-1 of V span the orthogonal complement of v₀.
    let tangents: Vec<Vec<Complex64>> = (0..n - 1)
        .map(|c| svd.v.column(c).iter().copied().collect())
        .collect();
    let mut out_samples = Vec::new();
    for coords in transverse_grid(n - 1, TRANSVERSE_RADIUS) {
        if out_samples.len() >= samples {
            break;
        }
        let mut z = p.to_vec();
        for (t, w) in tangents.iter().zip(&coords) {
            for i in 0..n {
                z[i] += t[i] * w;
            }
        }
        let leaf = flow_taylor_from(p, &field.field, &z, k);
        let jet = compose_jet(&detj, &leaf, k)?.0.remove(0);
        out_samples.push(WeierstrassSample {
            point: z,
            coefficients: weierstrass_coefficients(&jet, m)?,
        });
    }
    Ok(FoliationChart {
        p: p.to_vec(),
        ball_radius: TRANSVERSE_RADIUS,
        order: k,
        field,
        flow,
        jacobian_jet,
        weierstrass_order: m,
        samples: out_samples,
    })
}

/// Complex coordinates of a tensor grid with `TRANSVERSE_GRID` values per
/// real dimension, restricted to the ball of radius `r`.
fn transverse_grid(dim: usize, r: f64) -> Vec<Vec<Complex64>> {
    let g = TRANSVERSE_GRID;
    let vals: Vec<f64> = (0..g)
        .map(|i| -r + 2.0 * r * i as f64 / (g - 1) as f64)
        .collect();
    let total = g.pow(2 * dim as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let mut real = Vec::with_capacity(2 * dim);
        for _ in 0..2 * dim {
            real.push(vals[rest % g]);
            rest /= g;
        }
        let norm2: f64 = real.iter().map(|x| x * x).sum();
        if norm2 <= r * r * (1.0 + 1e-12) {
            out.push(
                real.chunks(2)
                    .map(|c| Complex64::new(c[0], c[1]))
                    .collect(),
            );
        }
    }
    // Center first, then by distance, so truncated sample lists stay local.
    out.sort_by(|a: &Vec<Complex64>, b: &Vec<Complex64>| {
        let na: f64 = a.iter().map(|v| v.norm_sqr()).sum();
        let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum();
        na.total_cmp(&nb)
    });
    out
}

fn weierstrass_coefficients(jet: &Jet, m: usize) -> Result<Vec<Complex64>> {
    let scale = jet.max_abs();
    let mut coeffs = jet.coeffs().to_vec();
    while coeffs.len() > m + 1 && coeffs.last().is_some_and(|c| c.norm() <= 1e-12 * scale) {
        coeffs.pop();
    }
    let mut roots = poly_roots(&coeffs)?;
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    roots.truncate(m);
    let monic = poly_from_roots(&roots, Complex64::new(1.0, 0.0));
    Ok(monic[..m].to_vec())
}

/// Comparison of the disc Laplacian `Δ_ζ (|F|² ∘ Θ)` with `|det J(Θ)|²`
/// along the leaf through `p`.
#[derive(Clone, Debug, Serialize)]
pub struct ComparabilityReport {
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Measures `Δ_ζ(φ∘Θ) / |J(p; ζ)|²` at `samples` points with `|ζ|` up to
/// `radius`, using centered second differences.
pub fn laplacian_comparability(
    chart: &FoliationChart,
    map: &PolyMap,
    samples: usize,
    radius: f64,
) -> Result<ComparabilityReport> {
    let phi = |zeta: Complex64| -> Result<f64> {
        let z = chart.flow.eval(zeta);
        Ok(map.evaluate(&z)?.iter().map(|v| v.norm_sqr()).sum())
    };
    let h = radius * 1e-2;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for j in 0..samples {
        let rho = radius * (0.5 + 0.5 * j as f64 / samples.max(1) as f64);
        let theta = 2.0 * std::f64::consts::PI * (j as f64 * 0.618_033_988_75).fract();
        let zeta = Complex64::from_polar(rho, theta);
        let mut lap = -4.0 * phi(zeta)?;
        for d in [
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, h),
            Complex64::new(0.0, -h),
        ] {
            lap += phi(zeta + d)?;
        }
        lap /= h * h;
        let jz = chart.jacobian_jet.eval(zeta).norm_sqr();
        let ratio = lap / jz;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(ComparabilityReport {
        samples,
        min_ratio: lo,
        max_ratio: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{MultiPoly, SeriesBasis};
    use nalgebra::DMatrix;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_field_flows_linearly() {
        let b = SeriesBasis::new(2, 4);
        let v = DMatrix::from_column_slice(2, 1, &[c(2.0), Complex64::new(0.0, 1.0)]);
        let x = MatSeries::constant(&b, v);
        let p = [c(1.0), c(-1.0)];
        let th = flow_taylor(&p, &x, 4);
        assert_eq!(th.coeff(0), p.to_vec());
        assert_eq!(th.coeff(1), vec![c(2.0), Complex64::new(0.0, 1.0)]);
        for k in 2..=4 {
            assert!(th.coeff(k).iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn exponential_flow() {
        let b = SeriesBasis::new(1, 8);
        let x = MatSeries::from_polys(&b, &[vec![MultiPoly::variable(1, 0)]], &[c(1.0)]);
        let th = flow_taylor(&[c(1.0)], &x, 8);
        let mut fact = 1.0;
        for k in 0..=8 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((th.0[0].coeff(k).re - 1.0 / fact).abs() < 1e-14);
        }
    }

    #[test]
    fn decoupled_weierstrass_order_one() {
        let f = PolyMap::new(
            2,
            vec![
                MultiPoly::variable(2, 0),
                MultiPoly::monomial(vec![0, 2], c(1.0)),
            ],
        )
        .unwrap();
        let chart = foliation_prepare(&f, &[c(1.0), c(0.0)], 4, 10).unwrap();
        assert_eq!(chart.weierstrass_order, 1);
        assert!((chart.jacobian_jet.coeff(1).norm() - 2.0).abs() < 1e-10);
        assert_eq!(chart.samples.len(), 10);
    }

    #[test]
    fn transverse_grid_counts() {
        // 2 real dims, 5x5 grid inside the disc: 13 points (|x|+|y| grid check)
        assert_eq!(transverse_grid(1, 1.0).len(), 13);
    }
}
