use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// A polynomial map `F = (F_1, ..., F_m)` of `n` complex variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    n: usize,
    components: Vec<MultiPoly>,
    homogeneous_degree: Option<u32>,
}

impl PolyMap {
    pub fn new(n: usize, components: Vec<MultiPoly>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for c in &components {
            if c.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.n(),
                });
            }
        }
        Ok(PolyMap {
            n,
            components,
            homogeneous_degree: None,
        })
    }

    /// Like [`PolyMap::new`] but also records and validates a homogeneous degree.
    pub fn homogeneous(n: usize, components: Vec<MultiPoly>, d: u32) -> Result<Self> {
        let mut map = PolyMap::new(n, components)?;
        map.set_homogeneous_degree(d)?;
        Ok(map)
    }

    pub fn set_homogeneous_degree(&mut self, d: u32) -> Result<()> {
        if d == 0 {
            return Err(Error::NotHomogeneous("degree must be positive".into()));
        }
        for (j, c) in self.components.iter().enumerate() {
            if !c.is_homogeneous_of(d) {
                return Err(Error::NotHomogeneous(format!(
                    "component {} has a term of degree other than {d}",
                    j + 1
                )));
            }
        }
        self.homogeneous_degree = Some(d);
        Ok(())
    }

    /// Detects a common homogeneous degree from the terms, if there is one.
    pub fn infer_homogeneous_degree(&self) -> Option<u32> {
        let d = self.components.iter().filter_map(MultiPoly::degree).max()?;
        if d > 0 && self.components.iter().all(|c| !c.is_zero() && c.is_homogeneous_of(d)) {
            Some(d)
        } else {
            None
        }
    }

    pub fn identity(n: usize) -> Self {
        let comps = (0..n).map(|i| MultiPoly::variable(n, i)).collect();
        PolyMap::homogeneous(n, comps, 1).expect("identity is linear")
    }

    /// `(z_1^d, ..., z_n^d)`.
    pub fn diagonal_power(n: usize, d: u32) -> Self {
        let comps = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = d;
                MultiPoly::monomial(e, Complex64::new(1.0, 0.0))
            })
            .collect();
        PolyMap::homogeneous(n, comps, d).expect("monomials are homogeneous")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn homogeneous_degree(&self) -> Option<u32> {
        self.homogeneous_degree
    }

    /// Largest total degree among the components.
    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .filter_map(MultiPoly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn is_square(&self) -> bool {
        self.components.len() == self.n
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Vec<Complex64>> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        if z.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite evaluation point".into()));
        }
        Ok(self.components.iter().map(|c| c.eval(z)).collect())
    }

    /// Symbolic Jacobian, entry `(j, k)` is `dF_j/dz_k`.
    pub fn jacobian(&self) -> Vec<Vec<MultiPoly>> {
        self.components
            .iter()
            .map(|c| (0..self.n).map(|k| c.derivative(k)).collect())
            .collect()
    }

    /// Numeric Jacobian at `z`.
    pub fn jacobian_at(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let m = self.components.len();
        DMatrix::from_fn(m, self.n, |j, k| self.components[j].derivative(k).eval(z))
    }

    pub fn det_jacobian(&self) -> Result<MultiPoly> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.components.len(),
            });
        }
        Ok(cofactor_det(&self.jacobian(), self.n))
    }

    /// Samples `|F|` over the unit sphere of `C^n` and reports its minimum.
    ///
    /// Homogeneity turns a positive minimum into "no zero off the origin", but
    /// only up to the sampling resolution; this is a heuristic certificate.
    pub fn check_isolated_zero(
        &self,
        samples: usize,
        tol: f64,
        seed: u64,
    ) -> Result<IsolatedZeroCertificate> {
        if self.homogeneous_degree.or(self.infer_homogeneous_degree()).is_none() {
            return Err(Error::NotHomogeneous(
                "isolated-zero check needs a homogeneous map".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = f64::INFINITY;
        let mut argmin = vec![Complex64::new(0.0, 0.0); self.n];
        for _ in 0..samples {
            let z = random_sphere_point(&mut rng, self.n);
            let norm = self
                .evaluate(&z)?
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt();
            if norm < best {
                best = norm;
                argmin = z;
            }
        }
        // A few projected gradient-free refinements sharpen the minimum
        // without changing the sampling character of the certificate.
        let (best, argmin) = self.refine_sphere_minimum(best, argmin);
        Ok(IsolatedZeroCertificate {
            min_abs: best,
            argmin,
            samples,
            pass: best > tol,
        })
    }

    fn refine_sphere_minimum(&self, mut best: f64, mut at: Vec<Complex64>) -> (f64, Vec<Complex64>) {
        let mut step = 0.05;
        let norm_of = |z: &[Complex64]| {
            self.components
                .iter()
                .map(|c| c.eval(z).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        while step > 1e-9 {
            let mut improved = false;
            for k in 0..2 * self.n {
                for sign in [1.0, -1.0] {
                    let mut z = at.clone();
                    let dir = if k % 2 == 0 {
                        Complex64::new(sign * step, 0.0)
                    } else {
                        Complex64::new(0.0, sign * step)
                    };
                    z[k / 2] += dir;
                    let r = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    z.iter_mut().for_each(|v| *v /= r);
                    let val = norm_of(&z);
                    if val < best {
                        best = val;
                        at = z;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        (best, at)
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            n: self.n,
            homogeneous_degree: self.homogeneous_degree,
            components: self
                .components
                .iter()
                .map(|c| {
                    c.terms()
                        .map(|(e, v)| TermJson {
                            exp: e.as_slice().to_vec(),
                            coef: [v.re, v.im],
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(j: &MapJson) -> Result<Self> {
        let comps = j
            .components
            .iter()
            .map(|terms| {
                MultiPoly::from_terms(
                    j.n,
                    terms
                        .iter()
                        .map(|t| (t.exp.clone(), Complex64::new(t.coef[0], t.coef[1]))),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        match j.homogeneous_degree {
            Some(d) => PolyMap::homogeneous(j.n, comps, d),
            None => PolyMap::new(j.n, comps),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        PolyMap::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("map JSON is always serializable")
    }
}

pub(crate) fn random_sphere_point(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let r = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    z.iter_mut().for_each(|v| *v /= r);
    z
}

fn cofactor_det(m: &[Vec<MultiPoly>], n: usize) -> MultiPoly {
    let rows: Vec<usize> = (0..m.len()).collect();
    let cols: Vec<usize> = (0..m.len()).collect();
    cofactor_rec(m, &rows, &cols, n)
}

fn cofactor_rec(m: &[Vec<MultiPoly>], rows: &[usize], cols: &[usize], n: usize) -> MultiPoly {
    if rows.is_empty() {
        return MultiPoly::constant(n, Complex64::new(1.0, 0.0));
    }
    let r = rows[0];
    let rest_rows = &rows[1..];
    let mut acc = MultiPoly::zero(n);
    for (idx, &c) in cols.iter().enumerate() {
        let entry = &m[r][c];
        if entry.is_zero() {
            continue;
        }
        let rest_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor_rec(m, rest_rows, &rest_cols, n);
        let term = entry * &minor;
        acc = if idx % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Output of [`PolyMap::check_isolated_zero`].
#[derive(Clone, Debug, Serialize)]
pub struct IsolatedZeroCertificate {
    pub min_abs: f64,
    pub argmin: Vec<Complex64>,
    pub samples: usize,
    pub pass: bool,
}

/// On-disk representation of a [`PolyMap`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapJson {
    pub n: usize,
    pub homogeneous_degree: Option<u32>,
    pub components: Vec<Vec<TermJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: [f64; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_power_sphere_minimum() {
        for d in 2..5u32 {
            let f = PolyMap::diagonal_power(2, d);
            let cert = f.check_isolated_zero(2000, 1e-6, 7).unwrap();
            let expected = 2f64.powf((1.0 - d as f64) / 2.0);
            assert!(cert.pass);
            assert!((cert.min_abs - expected).abs() < 1e-6 * expected, "d={d}");
        }
    }

    #[test]
    fn common_factor_fails_isolation() {
        let f = PolyMap::homogeneous(
            2,
            vec![
                MultiPoly::monomial(vec![2, 0], c(1.0)),
                MultiPoly::monomial(vec![1, 1], c(1.0)),
            ],
            2,
        )
        .unwrap();
        let cert = f.check_isolated_zero(2000, 1e-6, 1).unwrap();
        assert!(!cert.pass);
    }

    #[test]
    fn non_homogeneous_rejected_by_isolation_check() {
        let f = PolyMap::new(
            1,
            vec![&MultiPoly::variable(1, 0) + &MultiPoly::monomial(vec![2], c(1.0))],
        )
        .unwrap();
        assert!(matches!(
            f.check_isolated_zero(1000, 1e-6, 0),
            Err(Error::NotHomogeneous(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let f = PolyMap::diagonal_power(3, 2);
        let back = PolyMap::from_json_str(&f.to_json_string()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn homogeneity_is_validated() {
        let comps = vec![&MultiPoly::variable(1, 0) + &MultiPoly::monomial(vec![2], c(1.0))];
        assert!(PolyMap::homogeneous(1, comps, 2).is_err());
    }
}
