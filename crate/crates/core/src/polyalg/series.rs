use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::{pow_u32, MultiPoly};

/// Monomial basis of `n` variables of total degree `<= order`, with a
/// precomputed product table for truncated multiplication.
#[derive(Debug)]
pub struct SeriesBasis {
    n: usize,
    order: usize,
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    products: Vec<(usize, usize, usize)>,
}

impl SeriesBasis {
    pub fn new(n: usize, order: usize) -> Arc<Self> {
        let mut exps = Vec::new();
        for deg in 0..=order as u32 {
            let mut bucket = Vec::new();
            compositions(n, deg, &mut vec![0; n], 0, &mut bucket);
            bucket.sort();
            bucket.reverse();
            exps.extend(bucket);
        }
        let index: HashMap<Vec<u32>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        let mut products = Vec::new();
        for (i, a) in exps.iter().enumerate() {
            for (j, b) in exps.iter().enumerate() {
                let s: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if let Some(&k) = index.get(&s) {
                    products.push((i, j, k));
                }
            }
        }
        Arc::new(SeriesBasis {
            n,
            order,
            exps,
            index,
            products,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, i: usize) -> &[u32] {
        &self.exps[i]
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.exps[i].iter().sum::<u32>() as usize
    }

    /// Value of each basis monomial at `delta`.
    pub fn monomials_at(&self, delta: &[Complex64]) -> Vec<Complex64> {
        self.exps
            .iter()
            .map(|e| {
                e.iter()
                    .zip(delta)
                    .fold(Complex64::new(1.0, 0.0), |acc, (&k, d)| acc * pow_u32(*d, k))
            })
            .collect()
    }
}

fn compositions(n: usize, left: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if pos == n - 1 {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        compositions(n, left - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Matrix-valued truncated Taylor series `Σ_α C_α δ^α` in `n` variables.
#[derive(Clone, Debug)]
pub struct MatSeries {
    basis: Arc<SeriesBasis>,
    coeffs: Vec<DMatrix<Complex64>>,
}

impl MatSeries {
    pub fn zero(basis: &Arc<SeriesBasis>, rows: usize, cols: usize) -> Self {
        MatSeries {
            basis: basis.clone(),
            coeffs: vec![DMatrix::zeros(rows, cols); basis.len()],
        }
    }

    pub fn constant(basis: &Arc<SeriesBasis>, m: DMatrix<Complex64>) -> Self {
        let mut s = MatSeries::zero(basis, m.nrows(), m.ncols());
        s.coeffs[0] = m;
        s
    }

    /// Taylor expansion at `p` of a matrix of polynomials.
    pub fn from_polys(basis: &Arc<SeriesBasis>, entries: &[Vec<MultiPoly>], p: &[Complex64]) -> Self {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        let mut s = MatSeries::zero(basis, rows, cols);
        for (r, row) in entries.iter().enumerate() {
            for (c, poly) in row.iter().enumerate() {
                let shifted = poly.shift(p);
                for (e, v) in shifted.terms() {
                    if let Some(i) = basis.index_of(e.as_slice()) {
                        s.coeffs[i][(r, c)] = *v;
                    }
                }
            }
        }
        s
    }

    pub fn basis(&self) -> &Arc<SeriesBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[DMatrix<Complex64>] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &DMatrix<Complex64> {
        &self.coeffs[i]
    }

    pub fn coeff_mut(&mut self, i: usize) -> &mut DMatrix<Complex64> {
        &mut self.coeffs[i]
    }

    pub fn nrows(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn ncols(&self) -> usize {
        self.coeffs[0].ncols()
    }

    pub fn mul(&self, rhs: &MatSeries) -> MatSeries {
        let mut out = MatSeries::zero(&self.basis, self.nrows(), rhs.ncols());
        for &(i, j, k) in &self.basis.products {
            let a = &self.coeffs[i];
            let b = &rhs.coeffs[j];
            if a.iter().all(|v| *v == Complex64::new(0.0, 0.0))
                || b.iter().all(|v| *v == Complex64::new(0.0, 0.0))
            {
                continue;
            }
            out.coeffs[k] += a * b;
        }
        out
    }

    pub fn add(&self, rhs: &MatSeries) -> MatSeries {
        MatSeries {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &MatSeries) -> MatSeries {
        MatSeries {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> MatSeries {
        MatSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_scaled_assign(&mut self, rhs: &MatSeries, s: Complex64) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b * s;
        }
    }

    /// Evaluates the truncated series at offset `delta` from the base point.
    pub fn eval(&self, delta: &[Complex64]) -> DMatrix<Complex64> {
        let mons = self.basis.monomials_at(delta);
        let mut out = DMatrix::zeros(self.nrows(), self.ncols());
        for (c, m) in self.coeffs.iter().zip(mons) {
            out += c * m;
        }
        out
    }

    /// Largest entry modulus over every coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|m| m.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes() {
        // binomial(n + K, K)
        assert_eq!(SeriesBasis::new(3, 4).len(), 35);
        assert_eq!(SeriesBasis::new(2, 3).len(), 10);
        assert_eq!(SeriesBasis::new(1, 5).len(), 6);
    }

    #[test]
    fn product_matches_pointwise() {
        let b = SeriesBasis::new(2, 6);
        let x = MultiPoly::variable(2, 0);
        let y = MultiPoly::variable(2, 1);
        let p = &(&x * &y) + &x;
        let q = &y - &MultiPoly::constant(2, Complex64::new(2.0, 1.0));
        let p0 = [Complex64::new(0.2, 0.1), Complex64::new(-0.4, 0.3)];
        let sp = MatSeries::from_polys(&b, &[vec![p.clone()]], &p0);
        let sq = MatSeries::from_polys(&b, &[vec![q.clone()]], &p0);
        let prod = sp.mul(&sq);
        let delta = [Complex64::new(0.01, 0.02), Complex64::new(-0.03, 0.0)];
        let z = [p0[0] + delta[0], p0[1] + delta[1]];
        let exact = p.eval(&z) * q.eval(&z);
        assert!((prod.eval(&delta)[(0, 0)] - exact).norm() < 1e-14);
    }
}
