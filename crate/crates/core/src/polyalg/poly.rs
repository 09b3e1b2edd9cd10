use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Terms whose modulus falls below this fraction of the largest coefficient
/// are dropped after arithmetic.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Exponent multi-index, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(exps: Vec<u32>) -> Self {
        Exponent(exps)
    }

    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Exponent(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn product(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `n` complex variables with double-precision
/// complex coefficients.
///
/// Terms are kept in graded-lex order, so every traversal (evaluation,
/// printing, serialization) is deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Exponent, Complex64>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = MultiPoly::zero(n);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(Exponent::zero(n), c);
        }
        p
    }

    /// The coordinate function `z_i`.
    pub fn variable(n: usize, i: usize) -> Self {
        let mut p = MultiPoly::zero(n);
        p.terms.insert(Exponent::unit(n, i), Complex64::new(1.0, 0.0));
        p
    }

    pub fn monomial(exp: Vec<u32>, c: Complex64) -> Self {
        let n = exp.len();
        MultiPoly::from_terms(n, [(exp, c)]).expect("exponent length matches by construction")
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging
    /// repeated exponents and dropping exact zeros.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = MultiPoly::zero(n);
        for (exp, c) in terms {
            if exp.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: exp.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
            *p.terms.entry(Exponent(exp)).or_default() += c;
        }
        p.terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximal total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponent::total_degree).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exp: &[u32]) -> Complex64 {
        self.terms
            .get(&Exponent(exp.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// True when every term has total degree exactly `d`.
    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.total_degree() == d)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = MultiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        };
        out.prune();
        out
    }

    /// Exact partial derivative with respect to `z_k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = MultiPoly::zero(self.n);
        for (e, c) in &self.terms {
            let ek = e.0[k];
            if ek == 0 {
                continue;
            }
            let mut de = e.0.clone();
            de[k] -= 1;
            out.terms.insert(Exponent(de), c * ek as f64);
        }
        out
    }

    /// Evaluates the polynomial, summing terms in graded-lex order.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for (zi, &k) in z.iter().zip(&e.0) {
                m *= pow_u32(*zi, k);
            }
            acc += m;
        }
        acc
    }

    /// Taylor re-expansion at `p`: returns `q` with `q(δ) = self(p + δ)`.
    pub fn shift(&self, p: &[Complex64]) -> Self {
        let n = self.n;
        let shifted: Vec<MultiPoly> = (0..n)
            .map(|i| &MultiPoly::constant(n, p[i]) + &MultiPoly::variable(n, i))
            .collect();
        let mut out = MultiPoly::zero(n);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(n, *c);
            for (i, &k) in e.0.iter().enumerate() {
                for _ in 0..k {
                    term = &term * &shifted[i];
                }
            }
            out = &out + &term;
        }
        out
    }

    fn prune(&mut self) {
        let max = self.max_abs_coeff();
        let cutoff = PRUNE_RELATIVE * max;
        self.terms
            .retain(|_, c| *c != Complex64::new(0.0, 0.0) && c.norm() >= cutoff);
    }
}

pub(crate) fn pow_u32(z: Complex64, k: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..k {
        acc *= z;
    }
    acc
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            *out.terms.entry(e.clone()).or_default() += c;
        }
        out.prune();
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        MultiPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n, rhs.n, "polynomial dimension mismatch");
        let mut out = MultiPoly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *out.terms.entry(ea.product(eb)).or_default() += ca * cb;
            }
        }
        out.prune();
        out
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            for (i, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*z{}", i + 1)?,
                    _ => write!(f, "*z{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}
