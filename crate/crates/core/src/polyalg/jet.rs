use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::map::PolyMap;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Truncated power series `a_0 + a_1 ζ + ... + a_K ζ^K`.
///
/// Arithmetic is exact through order `K`; higher orders are discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn zero(order: usize) -> Self {
        Jet {
            coeffs: vec![ZERO; order + 1],
        }
    }

    pub fn constant(order: usize, c: Complex64) -> Self {
        let mut j = Jet::zero(order);
        j.coeffs[0] = c;
        j
    }

    /// The series `ζ`.
    pub fn variable(order: usize) -> Self {
        let mut j = Jet::zero(order);
        if order >= 1 {
            j.coeffs[1] = ONE;
        }
        j
    }

    /// Takes coefficients `a_0..` and pads or truncates to `order`.
    pub fn from_coeffs(order: usize, coeffs: &[Complex64]) -> Self {
        let mut j = Jet::zero(order);
        for (dst, src) in j.coeffs.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn set_coeff(&mut self, k: usize, v: Complex64) {
        self.coeffs[k] = v;
    }

    pub fn truncate(&self, order: usize) -> Self {
        Jet::from_coeffs(order, &self.coeffs)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * zeta + c)
    }

    /// Formal derivative, keeping the same truncation order.
    pub fn derivative(&self) -> Self {
        let k = self.order();
        let mut out = Jet::zero(k);
        for i in 1..=k {
            out.coeffs[i - 1] = self.coeffs[i] * i as f64;
        }
        out
    }

    /// Substitutes `inner` (which must have zero constant term) into `self`.
    pub fn compose(&self, inner: &Jet) -> Result<Self> {
        if inner.coeff(0) != ZERO {
            return Err(Error::InvalidInput(
                "inner series of a composition must vanish at 0".into(),
            ));
        }
        let k = self.order().min(inner.order());
        let inner = inner.truncate(k);
        let mut acc = Jet::zero(k);
        for c in self.coeffs[..=k].iter().rev() {
            acc = &(&acc * &inner) + &Jet::constant(k, *c);
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Jet::constant(self.order(), ONE);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `1/f` as a jet; needs `f(0) ≠ 0`.
    pub fn recip(&self) -> Result<Self> {
        let a0 = self.coeffs[0];
        if a0 == ZERO {
            return Err(Error::InvalidInput("cannot invert a jet vanishing at 0".into()));
        }
        let k = self.order();
        let mut out = vec![ZERO; k + 1];
        out[0] = ONE / a0;
        for i in 1..=k {
            let s: Complex64 = (1..=i).map(|j| self.coeffs[j] * out[i - j]).sum();
            out[i] = -s / a0;
        }
        Ok(Jet { coeffs: out })
    }
}

fn binary<F: Fn(Complex64, Complex64) -> Complex64>(a: &Jet, b: &Jet, f: F) -> Jet {
    let k = a.order().min(b.order());
    Jet {
        coeffs: (0..=k).map(|i| f(a.coeffs[i], b.coeffs[i])).collect(),
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        binary(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        binary(self, rhs, |a, b| a - b)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-ONE)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let k = self.order().min(rhs.order());
        let mut out = Jet::zero(k);
        for i in 0..=k {
            let a = self.coeffs[i];
            if a == ZERO {
                continue;
            }
            for j in 0..=(k - i) {
                out.coeffs[i + j] += a * rhs.coeffs[j];
            }
        }
        out
    }
}

/// A tuple of scalar jets, e.g. an analytic disc `ψ: D → C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct VecJet(pub Vec<Jet>);

impl VecJet {
    /// Builds a vector jet from per-power coefficient vectors: `cols[k][i]`
    /// is the coefficient of `ζ^k` in component `i`.
    pub fn from_powers(order: usize, n: usize, cols: &[Vec<Complex64>]) -> Self {
        VecJet(
            (0..n)
                .map(|i| {
                    let cs: Vec<Complex64> = cols.iter().map(|v| v[i]).collect();
                    Jet::from_coeffs(order, &cs)
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(Jet::order).min().unwrap_or(0)
    }

    /// Coefficient vector of `ζ^k`.
    pub fn coeff(&self, k: usize) -> Vec<Complex64> {
        self.0.iter().map(|j| j.coeff(k)).collect()
    }

    pub fn eval(&self, zeta: Complex64) -> Vec<Complex64> {
        self.0.iter().map(|j| j.eval(zeta)).collect()
    }

    pub fn truncate(&self, order: usize) -> Self {
        VecJet(self.0.iter().map(|j| j.truncate(order)).collect())
    }

    /// Precomposes every component with `inner`.
    pub fn reparametrize(&self, inner: &Jet) -> Result<Self> {
        Ok(VecJet(
            self.0
                .iter()
                .map(|j| j.compose(inner))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn to_json(&self) -> Vec<Vec<[f64; 2]>> {
        self.0
            .iter()
            .map(|j| j.coeffs().iter().map(|c| [c.re, c.im]).collect())
            .collect()
    }

    pub fn from_json(comps: &[Vec<[f64; 2]>], order: usize) -> Self {
        VecJet(
            comps
                .iter()
                .map(|cs| {
                    let v: Vec<Complex64> = cs.iter().map(|c| Complex64::new(c[0], c[1])).collect();
                    Jet::from_coeffs(order, &v)
                })
                .collect(),
        )
    }
}

/// Taylor expansion of `F∘ψ` through order `k`.
pub fn compose_jet(map: &PolyMap, disc: &VecJet, k: usize) -> Result<VecJet> {
    if disc.dim() != map.n() {
        return Err(Error::DimensionMismatch {
            expected: map.n(),
            found: disc.dim(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidInput("jet order must be at least 1".into()));
    }
    let disc = disc.truncate(k);
    let max_deg = map.degree() as usize;
    // powers[i][e] = ψ_i^e
    let powers: Vec<Vec<Jet>> = disc
        .0
        .iter()
        .map(|psi| {
            let mut p = vec![Jet::constant(k, ONE)];
            for e in 1..=max_deg {
                let next = &p[e - 1] * psi;
                p.push(next);
            }
            p
        })
        .collect();
    let comps = map
        .components()
        .iter()
        .map(|poly| {
            let mut acc = Jet::zero(k);
            for (exp, c) in poly.terms() {
                let mut term = Jet::constant(k, *c);
                for (i, &e) in exp.as_slice().iter().enumerate() {
                    if e > 0 {
                        term = &term * &powers[i][e as usize];
                    }
                }
                acc = &acc + &term;
            }
            acc
        })
        .collect();
    Ok(VecJet(comps))
}

/// Result of [`vanishing_order`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(usize),
    /// All coefficients `a_1..a_K` vanish; `truncation` is `K`.
    Infinite { truncation: usize },
}

impl Order {
    pub fn finite(self) -> Option<usize> {
        match self {
            Order::Finite(k) => Some(k),
            Order::Infinite { .. } => None,
        }
    }
}

/// Relative tolerance below which a jet coefficient counts as zero.
pub const VANISHING_TOL: f64 = 1e-9;

/// Smallest `k >= 1` with a nonzero `ζ^k` coefficient in some component.
///
/// Coefficients are compared against `VANISHING_TOL` times the largest
/// coefficient of the whole jet (constant term included), which absorbs
/// cancellation noise from floating-point composition.
pub fn vanishing_order(f: &VecJet) -> Order {
    let scale = f
        .0
        .iter()
        .map(Jet::max_abs)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let k_max = f.order();
    for k in 1..=k_max {
        if f.0.iter().any(|j| j.coeff(k).norm() > VANISHING_TOL * scale) {
            return Order::Finite(k);
        }
    }
    Order::Infinite { truncation: k_max }
}

/// Default truncation order for a map of degree `d`.
pub fn default_order(d: u32) -> usize {
    2 * d as usize + 4
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_truncates() {
        let z = Jet::variable(3);
        let p = z.pow(5);
        assert!(p.coeffs().iter().all(|c| *c == ZERO));
    }

    #[test]
    fn exp_series_compose() {
        // exp(ζ) truncated, composed with 2ζ equals exp(2ζ)
        let k = 8;
        let mut fact = 1.0;
        let mut e = Jet::zero(k);
        for i in 0..=k {
            if i > 0 {
                fact *= i as f64;
            }
            e.set_coeff(i, c(1.0 / fact));
        }
        let two = Jet::variable(k).scale(c(2.0));
        let e2 = e.compose(&two).unwrap();
        let mut fact = 1.0;
        for i in 0..=k {
            if i > 0 {
                fact *= i as f64;
            }
            assert!((e2.coeff(i).re - 2f64.powi(i as i32) / fact).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_jet_has_infinite_order() {
        let f = VecJet(vec![Jet::constant(5, c(2.0)), Jet::constant(5, c(-1.0))]);
        assert_eq!(vanishing_order(&f), Order::Infinite { truncation: 5 });
    }

    #[test]
    fn cube_has_order_three() {
        let f = VecJet(vec![Jet::variable(6).pow(3)]);
        assert_eq!(vanishing_order(&f), Order::Finite(3));
    }

    #[test]
    fn identity_map_composition_is_disc() {
        let f = PolyMap::identity(2);
        let psi = VecJet(vec![
            Jet::from_coeffs(4, &[c(1.0), c(2.0), c(0.5)]),
            Jet::from_coeffs(4, &[c(0.0), c(-1.0), c(0.0), c(3.0)]),
        ]);
        let out = compose_jet(&f, &psi, 4).unwrap();
        assert_eq!(out, psi);
    }
}
