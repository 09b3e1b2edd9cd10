use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum number of active points for a grid to be accepted.
pub const MIN_ACTIVE: usize = 100;

/// Cell-centered grid over the square circumscribing `D(center, radius)`,
/// restricted to the points inside the open disc.
#[derive(Clone, Debug)]
pub struct DiscGrid {
    pub center: Complex64,
    pub radius: f64,
    pub n: usize,
    pub h: f64,
    /// `(i, j)` lattice coordinates of the active points.
    active: Vec<(usize, usize)>,
    /// Row-major `n × n` map from lattice point to active index.
    index: Vec<Option<usize>>,
}

impl DiscGrid {
    pub fn new(center: Complex64, radius: f64, n: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput("grid radius must be positive".into()));
        }
        let h = 2.0 * radius / n as f64;
        let mut active = Vec::new();
        let mut index = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(
                    -radius + (i as f64 + 0.5) * h,
                    -radius + (j as f64 + 0.5) * h,
                );
                if z.norm() < radius {
                    index[i * n + j] = Some(active.len());
                    active.push((i, j));
                }
            }
        }
        if active.len() < MIN_ACTIVE {
            return Err(Error::InvalidInput(format!(
                "grid has {} active points, need at least {MIN_ACTIVE}",
                active.len()
            )));
        }
        Ok(DiscGrid {
            center,
            radius,
            n,
            h,
            active,
            index,
        })
    }

    pub fn unit(n: usize) -> Result<Self> {
        DiscGrid::new(Complex64::new(0.0, 0.0), 1.0, n)
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn lattice(&self, k: usize) -> (usize, usize) {
        self.active[k]
    }

    /// Active index of lattice point `(i, j)`, if inside the disc.
    pub fn at(&self, i: isize, j: isize) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.n || j as usize >= self.n {
            return None;
        }
        self.index[i as usize * self.n + j as usize]
    }

    /// Offset of active point `k` from the center.
    pub fn offset(&self, k: usize) -> Complex64 {
        let (i, j) = self.active[k];
        Complex64::new(
            -self.radius + (i as f64 + 0.5) * self.h,
            -self.radius + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn point(&self, k: usize) -> Complex64 {
        self.center + self.offset(k)
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Samples a function at every active point.
    pub fn sample<T>(&self, f: impl Fn(Complex64) -> T) -> Vec<T> {
        (0..self.len()).map(|k| f(self.point(k))).collect()
    }

    /// Midpoint-rule integral of `|f|²`.
    pub fn l2_sq(&self, f: &[Complex64]) -> f64 {
        self.h * self.h * f.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.h * self.h * self.len() as f64
    }

    /// Neighbors along an axis (0 = x, 1 = y) in the negative and positive
    /// directions.
    pub fn neighbors(&self, k: usize, axis: usize) -> (Option<usize>, Option<usize>) {
        let (i, j) = self.active[k];
        let (i, j) = (i as isize, j as isize);
        match axis {
            0 => (self.at(i - 1, j), self.at(i + 1, j)),
            _ => (self.at(i, j - 1), self.at(i, j + 1)),
        }
    }
}
