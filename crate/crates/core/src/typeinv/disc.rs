use num_complex::Complex64;
use serde::Serialize;

use super::kernel::argmax;
use crate::error::{Error, Result};
use crate::polyalg::{compose_jet, vanishing_order, Jet, Order, PolyMap, VecJet};

/// Orders of `F∘ψ` at `ζ = 0`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct DiscOrder {
    /// `ν₀(F∘ψ)` in `C^n`.
    pub affine: Order,
    /// `ν₀(F̃∘ψ̃)` in an affine chart of the target; `None` when `ψ̃ = π∘ψ`
    /// is singular at 0 (or `ψ` passes through the origin).
    pub projective: Option<Order>,
}

fn derivative_norm(disc: &VecJet) -> f64 {
    disc.coeff(1).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// True when `ψ'(0) ∉ C ψ(0)`, i.e. `π∘ψ` is a nonsingular disc.
pub fn projectively_nonsingular(disc: &VecJet) -> bool {
    let p = disc.coeff(0);
    let v = disc.coeff(1);
    let pn = p.iter().map(|x| x.norm_sqr()).sum::<f64>();
    if pn == 0.0 {
        return false;
    }
    let ip: Complex64 = p.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    let perp: f64 = v
        .iter()
        .zip(&p)
        .map(|(b, a)| (b - a * (ip / pn)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    perp > 1e-10 * derivative_norm(disc).max(f64::MIN_POSITIVE)
}

/// `ν₀(F∘ψ)` and the projective order through jet order `k`.
pub fn disc_order_verify(map: &PolyMap, disc: &VecJet, k: usize) -> Result<DiscOrder> {
    if derivative_norm(disc) == 0.0 {
        return Err(Error::InvalidInput("disc is singular: ψ'(0) = 0".into()));
    }
    let f = compose_jet(map, disc, k)?;
    let affine = vanishing_order(&f);
    let projective = if projectively_nonsingular(disc) {
        Some(projective_order_of(&f)?)
    } else {
        None
    };
    Ok(DiscOrder { affine, projective })
}

/// Order of `π∘G` for a jet `G` with `G(0) ≠ 0`, in the chart of the largest
/// component of `G(0)`.
pub fn projective_order_of(g: &VecJet) -> Result<Order> {
    let g0 = g.coeff(0);
    let m0 = argmax(&g0);
    if g0[m0] == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("image jet vanishes at 0".into()));
    }
    let inv = g.0[m0].recip()?;
    let ratios: Vec<Jet> = g
        .0
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != m0)
        .map(|(_, c)| c * &inv)
        .collect();
    if ratios.is_empty() {
        return Ok(Order::Infinite {
            truncation: g.order(),
        });
    }
    Ok(vanishing_order(&VecJet(ratios)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::MultiPoly;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn radial_disc_has_order_one() {
        let f = PolyMap::diagonal_power(2, 3);
        let p = [c(0.6), Complex64::new(0.0, 0.8)];
        let disc = VecJet::from_powers(8, 2, &[p.to_vec(), p.to_vec()]);
        let o = disc_order_verify(&f, &disc, 8).unwrap();
        assert_eq!(o.affine, Order::Finite(1));
        assert_eq!(o.projective, None);
    }

    #[test]
    fn squares_at_axis_point() {
        let f = PolyMap::diagonal_power(2, 2);
        let disc = VecJet::from_powers(6, 2, &[vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]);
        let o = disc_order_verify(&f, &disc, 6).unwrap();
        assert_eq!(o.affine, Order::Finite(2));
        assert_eq!(o.projective, Some(Order::Finite(2)));
    }

    #[test]
    fn singular_disc_rejected() {
        let f = PolyMap::new(1, vec![MultiPoly::variable(1, 0)]).unwrap();
        let disc = VecJet::from_powers(4, 1, &[vec![c(1.0)], vec![c(0.0)]]);
        assert!(disc_order_verify(&f, &disc, 4).is_err());
    }
}
