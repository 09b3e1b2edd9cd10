use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::gaplab::DiscGrid;

/// Samples on the active points of a [`DiscGrid`].
#[derive(Clone, Debug)]
pub struct PlanarField<T = f64> {
    pub grid: DiscGrid,
    pub values: Vec<T>,
}

impl<T> PlanarField<T> {
    pub fn new(grid: DiscGrid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(PlanarField { grid, values })
    }

    pub fn from_fn(grid: DiscGrid, f: impl Fn(Complex64) -> T) -> Self {
        let values = grid.sample(f);
        PlanarField { grid, values }
    }
}

impl PlanarField<f64> {
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(k) => Err(Error::InvalidInput(format!(
                "non-finite sample at {}",
                self.grid.point(k)
            ))),
            None => Ok(()),
        }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Mean of `ln|ζ|` over the square `[-h/2, h/2]²`.
pub fn self_cell_log_mean(h: f64) -> f64 {
    (h / 2.0).ln() + (2f64.ln() - 3.0 + PI / 2.0) / 2.0
}

/// Five-point Laplacian at points whose four neighbors are active.
pub fn five_point_laplacian(grid: &DiscGrid, f: &[f64]) -> Vec<Option<f64>> {
    let h2 = grid.h * grid.h;
    (0..grid.len())
        .map(|k| {
            let (xm, xp) = grid.neighbors(k, 0);
            let (ym, yp) = grid.neighbors(k, 1);
            Some((f[xm?] + f[xp?] + f[ym?] + f[yp?] - 4.0 * f[k]) / h2)
        })
        .collect()
}

/// `b * Γ` with `Γ(ζ) = log|ζ| / 2π`, `b` extended by zero off the disc.
///
/// Cells are treated as midpoint quadrature except the self cell, which uses
/// the exact mean of `log` over the square. The sum is the plain direct sum,
/// evaluated as a zero-padded FFT convolution.
pub fn newtonian_potential(b: &PlanarField) -> Result<PlanarField> {
    newtonian_potential_scaled(b, 1.0)
}

/// Same as [`newtonian_potential`] with kernel `log(|ζ|/ρ) / 2π`. The two differ
/// by the harmonic constant `(∫b) log ρ / 2π`.
pub fn newtonian_potential_scaled(b: &PlanarField, rho: f64) -> Result<PlanarField> {
    b.check_finite()?;
    if !(rho > 0.0) {
        return Err(Error::InvalidInput("kernel scale must be positive".into()));
    }
    let grid = &b.grid;
    let n = grid.n;
    let h = grid.h;
    let m = (2 * n).next_power_of_two();
    let zero = Complex64::new(0.0, 0.0);

    let mut kernel = vec![zero; m * m];
    for di in -(n as isize - 1)..n as isize {
        for dj in -(n as isize - 1)..n as isize {
            let v = if di == 0 && dj == 0 {
                self_cell_log_mean(h) - rho.ln()
            } else {
                let r = h * ((di * di + dj * dj) as f64).sqrt();
                (r / rho).ln()
            };
            let (a, c) = (di.rem_euclid(m as isize) as usize, dj.rem_euclid(m as isize) as usize);
            kernel[a * m + c] = Complex64::new(v * h * h / (2.0 * PI), 0.0);
        }
    }
    let mut data = vec![zero; m * m];
    for (k, v) in b.values.iter().enumerate() {
        let (i, j) = grid.lattice(k);
        data[i * m + j] = Complex64::new(*v, 0.0);
    }

    let mut planner = FftPlanner::new();
    fft2(&mut planner, &mut kernel, m, false);
    fft2(&mut planner, &mut data, m, false);
    for (d, k) in data.iter_mut().zip(&kernel) {
        *d *= k;
    }
    fft2(&mut planner, &mut data, m, true);
    let scale = 1.0 / (m * m) as f64;
    let values = (0..grid.len())
        .map(|k| {
            let (i, j) = grid.lattice(k);
            data[i * m + j].re * scale
        })
        .collect();
    Ok(PlanarField {
        grid: grid.clone(),
        values,
    })
}

fn fft2(planner: &mut FftPlanner<f64>, data: &mut [Complex64], m: usize, inverse: bool) {
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    fft.process(data);
    // transpose, rows again, transpose back
    let mut t = vec![Complex64::new(0.0, 0.0); m * m];
    transpose(data, &mut t, m);
    fft.process(&mut t);
    transpose(&t, data, m);
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in 0..m {
            dst[j * m + i] = src[i * m + j];
        }
    }
}
