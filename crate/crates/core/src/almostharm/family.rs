use num_complex::Complex64;
use serde::Serialize;

use super::completion::{center_mean, derivative_on_half_disc, holomorphic_completion_with};
use super::potential::PlanarField;
use crate::error::{Error, Result};
use crate::gaplab::{fit_slope, DiscGrid};
use crate::polyalg::{compose_jet, vanishing_order, Jet, Order, PolyMap, VecJet};

/// Default shrinking radii `2^{-k}`, `k = 2..=6`.
pub fn default_radii() -> Vec<f64> {
    (2..=6).map(|k| 0.5f64.powi(k)).collect()
}

/// One member `ψ_t` of the family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DiscFamilyMember {
    pub t: f64,
    /// `max |φ(ψ_t) − Im ψ_t,n+1|` over `D(0, t)`.
    pub contact: f64,
    /// `sup |ψ_t'|` over `D(0, t)`.
    pub derivative_sup: f64,
    /// `|ψ_t'(0)|`.
    pub derivative_at_0: f64,
    /// `|ψ_t(0) − q|`.
    pub center_distance: f64,
    pub curvature: f64,
    pub cr_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscFamily {
    pub m: usize,
    pub members: Vec<DiscFamilyMember>,
    /// Fitted exponent of `contact ~ t^e`; `None` when every residual is at
    /// roundoff level.
    pub exponent: Option<f64>,
    /// RMS residual of the log-log fit.
    pub fit_residual: f64,
    pub saturated: bool,
    pub derivative_sup: f64,
    pub derivative_inf_at_0: f64,
}

impl DiscFamily {
    pub fn target(&self) -> usize {
        self.m + 2
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,contact,derivative_sup,derivative_at_0,center_distance\n");
        for r in &self.members {
            s.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e}\n",
                r.t, r.contact, r.derivative_sup, r.derivative_at_0, r.center_distance
            ));
        }
        s
    }
}

fn strip_constant(j: &Jet) -> Jet {
    let mut j = j.clone();
    j.set_coeff(0, Complex64::new(0.0, 0.0));
    j
}

/// Shrinking discs `ψ_t(ζ) = (ψ(ζ/2), iG_t(ζ/2) + iφ(p))` for `φ = |F|²`.
///
/// `ψ` is taken as the polynomial with the jet's coefficients and must have
/// `Δ(φ∘ψ) = O(|ζ|^m)`. `G_t` completes `f = φ∘ψ − φ(p)` on `D(0, t)`.
pub fn build_disc_family(map: &PolyMap, psi: &VecJet, m: usize, radii: &[f64], n: usize) -> Result<DiscFamily> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii to fit".into()));
    }
    if radii.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::InvalidInput("radii must lie in (0, 1]".into()));
    }
    let psi_deg = psi.order().max(1);
    let full = map.degree().max(1) as usize * psi_deg;
    let g = compose_jet(map, psi, full)?;
    let order = match vanishing_order(&g) {
        Order::Finite(k) => k,
        Order::Infinite { .. } => usize::MAX / 4,
    };
    if 2 * order < m + 2 {
        return Err(Error::InvalidInput(format!(
            "disc has order {order}, so Δ(φ∘ψ) is only O(|ζ|^{})",
            2 * order - 2
        )));
    }
    let fp = g.coeff(0);
    let var: Vec<Jet> = g.0.iter().map(strip_constant).collect();
    let dg: Vec<Jet> = g.0.iter().map(Jet::derivative).collect();
    let dpsi: Vec<Jet> = psi.0.iter().map(|j| j.truncate(psi_deg).derivative()).collect();

    let mut members = Vec::with_capacity(radii.len());
    for &t in radii {
        let grid = DiscGrid::new(Complex64::new(0.0, 0.0), t, n)?;
        let f = PlanarField::from_fn(grid.clone(), |z| {
            var.iter()
                .zip(&fp)
                .map(|(j, c)| {
                    let d = j.eval(z);
                    2.0 * (c.conj() * d).re + d.norm_sqr()
                })
                .sum::<f64>()
        });
        let b: Vec<f64> = grid.sample(|z| 4.0 * dg.iter().map(|j| j.eval(z).norm_sqr()).sum::<f64>());
        let c_bound = b.iter().fold(0.0f64, |a, x| a.max(x.abs())) * t * t;
        let comp = holomorphic_completion_with(&f, &b, c_bound)?;
        let gv = &comp.g.values;
        let mut contact: f64 = 0.0;
        for k in 0..grid.len() {
            if grid.offset(k).norm() < 0.5 * t {
                contact = contact.max((f.values[k] - gv[k].re).abs());
            }
        }
        let mut derivative_sup: f64 = 0.0;
        for (k, gp) in derivative_on_half_disc(&grid, gv) {
            let w = grid.point(k);
            let s: f64 = dpsi.iter().map(|j| j.eval(w).norm_sqr()).sum::<f64>() + gp.norm_sqr();
            derivative_sup = derivative_sup.max(0.5 * s.sqrt());
        }
        let g0 = center_mean(&grid, gv);
        let gp0 = center_mean(
            &grid,
            &(0..grid.len())
                .map(|k| match grid.neighbors(k, 0) {
                    (Some(a), Some(b)) => (gv[b] - gv[a]) / (2.0 * grid.h),
                    _ => Complex64::new(0.0, 0.0),
                })
                .collect::<Vec<_>>(),
        );
        let s0: f64 = dpsi.iter().map(|j| j.coeff(0).norm_sqr()).sum::<f64>() + gp0.norm_sqr();
        members.push(DiscFamilyMember {
            t,
            contact,
            derivative_sup,
            derivative_at_0: 0.5 * s0.sqrt(),
            // ψ_t(0) − q = (0, iG_t(0)) with Im G_t(0) = 0
            center_distance: g0.re.abs(),
            curvature: comp.report.curvature,
            cr_defect: comp.report.cr_defect,
        });
    }

    let floor = members
        .iter()
        .map(|r| 1e-13 * r.curvature.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let live: Vec<&DiscFamilyMember> = members.iter().filter(|r| r.contact > floor && r.contact > 0.0).collect();
    let saturated = live.len() < members.len();
    let (exponent, fit_residual) = if live.len() >= 2 {
        let x: Vec<f64> = live.iter().map(|r| r.t.ln()).collect();
        let y: Vec<f64> = live.iter().map(|r| r.contact.ln()).collect();
        let e = fit_slope(&x, &y);
        let my = y.iter().sum::<f64>() / y.len() as f64 - e * x.iter().sum::<f64>() / x.len() as f64;
        let rms = (x.iter().zip(&y).map(|(a, b)| (b - my - e * a).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
        (Some(e), rms)
    } else {
        (None, 0.0)
    };
    let derivative_sup = members.iter().map(|r| r.derivative_sup).fold(0.0, f64::max);
    let derivative_inf_at_0 = members.iter().map(|r| r.derivative_at_0).fold(f64::INFINITY, f64::min);
    Ok(DiscFamily {
        m,
        members,
        exponent,
        fit_residual,
        saturated,
        derivative_sup,
        derivative_inf_at_0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MultiPoly;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_image_saturates() {
        // F∘ψ ≡ (1, 1) along ψ = (1, ζ)
        let z1 = MultiPoly::variable(2, 0);
        let f = PolyMap::new(2, vec![z1.clone(), z1]).unwrap();
        let psi = VecJet::from_powers(1, 2, &[vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]]);
        let fam = build_disc_family(&f, &psi, 8, &default_radii(), 64).unwrap();
        assert!(fam.saturated);
        assert!(fam.exponent.is_none());
        assert!(fam.members.iter().all(|r| r.contact == 0.0));
    }

    #[test]
    fn affine_map_contact_is_quadratic() {
        let one = MultiPoly::constant(1, c(1.0));
        let z = MultiPoly::variable(1, 0);
        let f = MultiPoly::from_terms(1, one.terms().chain(z.terms()).map(|(e, v)| (e.as_slice().to_vec(), *v))).unwrap();
        let map = PolyMap::new(1, vec![f]).unwrap();
        let psi = VecJet::from_powers(1, 1, &[vec![c(0.0)], vec![c(1.0)]]);
        let fam = build_disc_family(&map, &psi, 0, &default_radii(), 64).unwrap();
        // |1+ζ|² = 1 + 2Re ζ + |ζ|², contact ~ t²
        let e = fam.exponent.unwrap();
        assert!((e - 2.0).abs() < 0.05, "{e}");
    }
}
