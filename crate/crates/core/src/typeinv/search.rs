use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::kernel::null_vectors;
use crate::error::{Error, Result};
use crate::leviform::KERNEL_TOL;
use crate::linalg::{kernel_dimension, max_abs};
use crate::polyalg::{compose_jet, PolyMap, VecJet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative least-squares residual below which `J(p) a = −R` counts as
/// solvable.
pub const RANGE_TOL: f64 = 1e-8;

/// Partial disc `ψ(ζ) = p + a₁ζ + … + a_kζ^k` with `F∘ψ = F(p) + O(ζ^{k+1})`.
#[derive(Clone, Debug, Serialize)]
pub struct DiscSearchState {
    pub base: Vec<Complex64>,
    /// `a₁, …, a_k`.
    pub coefficients: Vec<Vec<Complex64>>,
    /// Kernel component of each `a_j`, `j ≥ 2`. These only reparametrize
    /// the disc, so the search fixes them to zero.
    pub branch_parameters: Vec<Complex64>,
    /// Orders `1..=achieved` of `F∘ψ − F(p)` vanish.
    pub achieved: usize,
}

impl DiscSearchState {
    pub fn disc(&self, order: usize) -> VecJet {
        let mut cols = vec![self.base.clone()];
        cols.extend(self.coefficients.iter().cloned());
        VecJet::from_powers(order, self.base.len(), &cols)
    }
}

/// Outcome of the jet search at one point.
#[derive(Clone, Debug, Serialize)]
pub struct DiscSearch {
    pub point: Vec<Complex64>,
    /// Best `ν₀(F∘ψ)` over nonsingular discs through the point; a lower
    /// bound when `incomplete` is set.
    pub order: usize,
    /// Depth cap reached with every order still solvable.
    pub incomplete: bool,
    pub depth: usize,
    pub state: DiscSearchState,
    #[serde(skip)]
    pub witness: VecJet,
}

fn vnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Order-by-order jet lifting at `p`, up to order `depth`.
///
/// With `ker J(p) = span(v₀)` the disc starts `p + v₀ζ`. At order `k` the
/// `ζ^k` coefficient of `F∘ψ` is `J(p)a_k + R_k`, so it can be killed iff
/// `R_k ∈ range J(p)`; the least-norm `a_k` is used.
pub fn disc_order_search(map: &PolyMap, p: &[Complex64], depth: usize) -> Result<DiscSearch> {
    let n = map.n();
    if !map.is_square() {
        return Err(Error::InvalidInput("disc search needs a square map".into()));
    }
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    if depth < 1 {
        return Err(Error::InvalidInput("search depth must be at least 1".into()));
    }
    let origin = p.iter().all(|v| *v == ZERO);
    let finish = |coeffs: Vec<Vec<Complex64>>, order: usize, incomplete: bool, branch: Vec<Complex64>| {
        let state = DiscSearchState {
            base: p.to_vec(),
            coefficients: coeffs,
            branch_parameters: branch,
            achieved: order - 1,
        };
        let witness = state.disc(depth.max(order));
        DiscSearch {
            point: p.to_vec(),
            order,
            incomplete,
            depth,
            state,
            witness,
        }
    };
    if origin {
        // Any line through 0 is a disc of order exactly d.
        let d = map.degree() as usize;
        let mut e = vec![ZERO; n];
        e[0] = Complex64::new(1.0, 0.0);
        return Ok(finish(vec![e], d, false, vec![]));
    }
    let jp = map.jacobian_at(p);
    match kernel_dimension(&jp, KERNEL_TOL) {
        0 => {
            let (v, _) = null_vectors(&jp);
            let v: Vec<Complex64> = v.iter().copied().collect();
            return Ok(finish(vec![transverse(p, v)], 1, false, vec![]));
        }
        1 => {}
        dim => {
            return Err(Error::hypothesis_at(
                format!("dim ker J(p) = {dim}; the jet search needs a one-dimensional kernel"),
                p.to_vec(),
            ))
        }
    }
    let (v0, u) = null_vectors(&jp);
    let pinv = jp
        .clone()
        .pseudo_inverse(1e-12 * max_abs(&jp))
        .map_err(|e| Error::Numerical(e.to_string()))?;
    let jscale = max_abs(&jp);
    let mut coeffs: Vec<Vec<Complex64>> = vec![v0.iter().copied().collect()];
    let mut branch = Vec::new();
    for k in 2..=depth {
        let mut cols = vec![p.to_vec()];
        cols.extend(coeffs.iter().cloned());
        let disc = VecJet::from_powers(k, n, &cols);
        let r = DVector::from_vec(compose_jet(map, &disc, k)?.coeff(k));
        let obstruction = u.dotc(&r).norm();
        if obstruction > RANGE_TOL * r.norm().max(jscale) {
            return Ok(finish(coeffs, k, false, branch));
        }
        let a: DVector<Complex64> = -(&pinv * &r);
        coeffs.push(a.iter().copied().collect());
        branch.push(ZERO);
    }
    let order = depth + 1;
    Ok(finish(coeffs, order, true, branch))
}

/// A direction through `p` that is not parallel to `p`, preferring `v`.
fn transverse(p: &[Complex64], v: Vec<Complex64>) -> Vec<Complex64> {
    let pn = vnorm(p);
    let ip: Complex64 = p.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    let perp: Vec<Complex64> = v.iter().zip(p).map(|(b, a)| b - a * ip / (pn * pn)).collect();
    if vnorm(&perp) > 1e-6 {
        return perp;
    }
    let n = p.len();
    let i = (0..n)
        .min_by(|&a, &b| p[a].norm().total_cmp(&p[b].norm()))
        .unwrap_or(0);
    let mut e = vec![ZERO; n];
    e[i] = Complex64::new(1.0, 0.0);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Order;
    use crate::typeinv::disc::disc_order_verify;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn power_map_axis_point() {
        for d in 2..=4 {
            let f = PolyMap::diagonal_power(2, d);
            let s = disc_order_search(&f, &[c(0.0), c(1.0)], 10).unwrap();
            assert_eq!(s.order, d as usize);
            assert!(!s.incomplete);
            let o = disc_order_verify(&f, &s.witness, 10).unwrap();
            assert_eq!(o.affine, Order::Finite(d as usize));
        }
    }

    #[test]
    fn regular_point_gives_one() {
        let f = PolyMap::diagonal_power(2, 2);
        let s = disc_order_search(&f, &[c(0.6), c(0.8)], 6).unwrap();
        assert_eq!(s.order, 1);
    }

    #[test]
    fn origin_gives_degree() {
        let f = PolyMap::diagonal_power(3, 3);
        let s = disc_order_search(&f, &[c(0.0); 3], 6).unwrap();
        assert_eq!(s.order, 3);
    }
}
