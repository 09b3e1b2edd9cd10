use num_complex::Complex64;

use crate::polyalg::pow_u32;

/// A smooth real weight `φ` on the plane with analytic derivatives.
pub trait Weight: Sync {
    fn value(&self, z: Complex64) -> f64;
    /// `∂φ/∂z̄`
    fn dbar(&self, z: Complex64) -> Complex64;
    /// Real Laplacian `Δφ = 4 ∂∂̄φ`.
    fn laplacian(&self, z: Complex64) -> f64;
}

/// `φ = 0`
#[derive(Clone, Copy, Debug, Default)]
pub struct Flat;

impl Weight for Flat {
    fn value(&self, _: Complex64) -> f64 {
        0.0
    }
    fn dbar(&self, _: Complex64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn laplacian(&self, _: Complex64) -> f64 {
        0.0
    }
}

/// `φ = coef · |z − center|^{2k}`
#[derive(Clone, Copy, Debug)]
pub struct RadialPower {
    pub coef: f64,
    pub k: u32,
    pub center: Complex64,
}

impl RadialPower {
    pub fn new(coef: f64, k: u32) -> Self {
        RadialPower {
            coef,
            k,
            center: Complex64::new(0.0, 0.0),
        }
    }
}

impl Weight for RadialPower {
    fn value(&self, z: Complex64) -> f64 {
        self.coef * (z - self.center).norm_sqr().powi(self.k as i32)
    }
    fn dbar(&self, z: Complex64) -> Complex64 {
        if self.k == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let w = z - self.center;
        w * (self.coef * self.k as f64 * w.norm_sqr().powi(self.k as i32 - 1))
    }
    fn laplacian(&self, z: Complex64) -> f64 {
        if self.k == 0 {
            return 0.0;
        }
        let k = self.k as f64;
        4.0 * self.coef * k * k * (z - self.center).norm_sqr().powi(self.k as i32 - 1)
    }
}

/// `φ = Re Σ c_{pq} z^p z̄^q`
#[derive(Clone, Debug, Default)]
pub struct HermitianPoly {
    pub terms: Vec<(u32, u32, Complex64)>,
}

impl Weight for HermitianPoly {
    fn value(&self, z: Complex64) -> f64 {
        let zb = z.conj();
        self.terms
            .iter()
            .map(|&(p, q, c)| (c * pow_u32(z, p) * pow_u32(zb, q)).re)
            .sum()
    }
    fn dbar(&self, z: Complex64) -> Complex64 {
        // ∂̄ Re f = (∂̄f + conj(∂f)) / 2
        let zb = z.conj();
        let mut s = Complex64::new(0.0, 0.0);
        for &(p, q, c) in &self.terms {
            if q > 0 {
                s += c * q as f64 * pow_u32(z, p) * pow_u32(zb, q - 1);
            }
            if p > 0 {
                s += (c * p as f64 * pow_u32(z, p - 1) * pow_u32(zb, q)).conj();
            }
        }
        s * 0.5
    }
    fn laplacian(&self, z: Complex64) -> f64 {
        let zb = z.conj();
        self.terms
            .iter()
            .filter(|&&(p, q, _)| p > 0 && q > 0)
            .map(|&(p, q, c)| 4.0 * (c * (p * q) as f64 * pow_u32(z, p - 1) * pow_u32(zb, q - 1)).re)
            .sum()
    }
}

/// `φ_R(z) = φ(z / R)`
pub struct Dilated<'a> {
    pub inner: &'a dyn Weight,
    pub r: f64,
}

impl Weight for Dilated<'_> {
    fn value(&self, z: Complex64) -> f64 {
        self.inner.value(z / self.r)
    }
    fn dbar(&self, z: Complex64) -> Complex64 {
        self.inner.dbar(z / self.r) / self.r
    }
    fn laplacian(&self, z: Complex64) -> f64 {
        self.inner.laplacian(z / self.r) / (self.r * self.r)
    }
}

/// `φ + Re G` for a holomorphic polynomial `G` (coefficients in increasing degree).
pub struct GaugeShifted<'a> {
    pub inner: &'a dyn Weight,
    pub g: Vec<Complex64>,
}

impl GaugeShifted<'_> {
    pub fn g_at(&self, z: Complex64) -> Complex64 {
        crate::linalg::horner(&self.g, z)
    }

    pub fn g_prime_at(&self, z: Complex64) -> Complex64 {
        let d: Vec<Complex64> = self
            .g
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        crate::linalg::horner(&d, z)
    }
}

impl Weight for GaugeShifted<'_> {
    fn value(&self, z: Complex64) -> f64 {
        self.inner.value(z) + self.g_at(z).re
    }
    fn dbar(&self, z: Complex64) -> Complex64 {
        self.inner.dbar(z) + self.g_prime_at(z).conj() * 0.5
    }
    fn laplacian(&self, z: Complex64) -> f64 {
        self.inner.laplacian(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(w: &dyn Weight, z: Complex64) {
        let h = 1e-4;
        let f = |dz: Complex64| w.value(z + dz);
        let fx = (f(Complex64::new(h, 0.0)) - f(Complex64::new(-h, 0.0))) / (2.0 * h);
        let fy = (f(Complex64::new(0.0, h)) - f(Complex64::new(0.0, -h))) / (2.0 * h);
        let dbar = Complex64::new(fx, fy) * 0.5;
        assert!((dbar - w.dbar(z)).norm() < 1e-6 * (1.0 + dbar.norm()));
        let lap = (f(Complex64::new(h, 0.0))
            + f(Complex64::new(-h, 0.0))
            + f(Complex64::new(0.0, h))
            + f(Complex64::new(0.0, -h))
            - 4.0 * f(Complex64::new(0.0, 0.0)))
            / (h * h);
        assert!((lap - w.laplacian(z)).abs() < 1e-4 * (1.0 + lap.abs()));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let z = Complex64::new(0.3, -0.4);
        fd_check(&RadialPower::new(2.5, 3), z);
        let hp = HermitianPoly {
            terms: vec![
                (1, 1, Complex64::new(1.0, 0.0)),
                (2, 1, Complex64::new(0.3, -0.2)),
                (3, 0, Complex64::new(0.0, 1.0)),
            ],
        };
        fd_check(&hp, z);
        let g = GaugeShifted {
            inner: &hp,
            g: vec![Complex64::new(0.1, 0.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)],
        };
        fd_check(&g, z);
        fd_check(&Dilated { inner: &hp, r: 2.0 }, z);
    }
}
