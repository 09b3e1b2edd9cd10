use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use super::disc::disc_order_verify;
use super::kernel::{critical_kernel_certificate, same_line, KernelCertificate};
use super::search::{disc_order_search, DiscSearch};
use crate::error::{Error, Result};
use crate::leviform::foliation_prepare;
use crate::polyalg::{default_order, PolyMap, VecJet};

/// How a value of `𝔱` was obtained.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TMode {
    /// Exact orders of user-supplied witness discs (a lower bound for `𝔱`).
    VerifiedBySuppliedDiscs,
    /// Jet search at sampled and special points of the critical locus.
    SearchedToDepth(usize),
}

impl TMode {
    pub fn label(&self) -> String {
        match self {
            TMode::VerifiedBySuppliedDiscs => "verified-by-supplied-discs".into(),
            TMode::SearchedToDepth(k) => format!("searched-to-depth-{k}"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TInvariant {
    pub value: usize,
    pub mode: TMode,
    /// Some search hit its depth cap, so `value` may be too small.
    pub incomplete: bool,
    /// Locus sampling is heuristic, so a searched value is a lower bound for
    /// the true supremum unless the special points are complete.
    pub heuristic: bool,
    pub points: Vec<DiscSearch>,
}

/// Options for [`t_invariant`].
#[derive(Clone, Debug)]
pub struct TOptions {
    pub depth: usize,
    pub locus_samples: usize,
    pub special_points: Vec<Vec<Complex64>>,
    pub seed: u64,
}

impl TOptions {
    pub fn for_map(map: &PolyMap) -> Self {
        TOptions {
            depth: default_order(map.degree()),
            locus_samples: 200,
            special_points: vec![],
            seed: 0,
        }
    }
}

/// `𝔱(F̃)` as the best jet-search order over critical-locus samples, their
/// singular points and the supplied special points.
pub fn t_invariant(map: &PolyMap, opts: &TOptions) -> Result<TInvariant> {
    let cert = critical_kernel_certificate(map, opts.locus_samples, opts.seed)?;
    t_invariant_with(map, opts, &cert)
}

pub fn t_invariant_with(map: &PolyMap, opts: &TOptions, cert: &KernelCertificate) -> Result<TInvariant> {
    let mut points: Vec<Vec<Complex64>> = opts.special_points.clone();
    for z in cert.singular_points.iter().chain(&cert.locus) {
        if !points.iter().any(|q| same_line(q, z)) {
            points.push(z.clone());
        }
    }
    let searches: Vec<DiscSearch> = points
        .par_iter()
        .map(|p| disc_order_search(map, p, opts.depth))
        .collect::<Result<_>>()?;
    let value = searches.iter().map(|s| s.order).max().unwrap_or(1).max(1);
    let incomplete = searches.iter().any(|s| s.incomplete);
    if map.n() == 2 && value > map.degree() as usize {
        return Err(Error::Numerical(format!(
            "search found order {value} > d = {} for a map of P^1",
            map.degree()
        )));
    }
    let mut best: Vec<DiscSearch> = searches.into_iter().filter(|s| s.order == value).collect();
    best.truncate(8);
    Ok(TInvariant {
        value,
        mode: TMode::SearchedToDepth(opts.depth),
        incomplete,
        heuristic: true,
        points: best,
    })
}

/// Largest projective order among supplied nonsingular discs.
pub fn t_from_discs(map: &PolyMap, discs: &[VecJet], depth: usize) -> Result<TInvariant> {
    let mut value = 1;
    let mut incomplete = false;
    for disc in discs {
        let o = disc_order_verify(map, disc, depth)?;
        match o.projective {
            Some(crate::polyalg::Order::Finite(k)) => value = value.max(k),
            Some(crate::polyalg::Order::Infinite { truncation }) => {
                value = value.max(truncation + 1);
                incomplete = true;
            }
            None => {
                return Err(Error::InvalidInput(
                    "supplied disc is singular in projective space".into(),
                ))
            }
        }
    }
    Ok(TInvariant {
        value,
        mode: TMode::VerifiedBySuppliedDiscs,
        incomplete,
        heuristic: false,
        points: vec![],
    })
}

/// `s(Ω;0) = 1/(2 max{d, 𝔱})` together with `T̃¹ = 2 max{d, 𝔱}`.
#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct SharpOrder {
    pub s_num: u64,
    pub s_den: u64,
    pub catlin_type: u64,
}

impl SharpOrder {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.s_num, self.s_den)
    }
}

pub fn sharp_order(map: &PolyMap, t: usize, cert: &KernelCertificate) -> Result<SharpOrder> {
    if !cert.pass {
        return Err(Error::Hypothesis {
            reason: format!(
                "dim ker J reaches {} on the critical locus; the sharp-order theorem needs at most 1",
                cert.max_kernel_dim
            ),
            witness: cert.witnesses.first().cloned(),
        });
    }
    let d = map
        .homogeneous_degree()
        .or(map.infer_homogeneous_degree())
        .ok_or_else(|| Error::NotHomogeneous("sharp order needs a homogeneous map".into()))?;
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let ty = 2 * (d as u64).max(t.max(1) as u64);
    let s = Ratio::new(1, ty);
    Ok(SharpOrder {
        s_num: *s.numer(),
        s_den: *s.denom(),
        catlin_type: ty,
    })
}

/// `𝔥_p(φ)` from the best disc order at `p`, with the foliation cross-check
/// `2m ≤ 𝔥_p` where the Weierstrass order `m` is available.
#[derive(Clone, Debug, Serialize)]
pub struct HpReport {
    pub point: Vec<Complex64>,
    pub disc_order: usize,
    pub hp: usize,
    pub incomplete: bool,
    pub weierstrass_order: Option<usize>,
    pub consistent: bool,
}

pub fn hp_flatness(map: &PolyMap, p: &[Complex64], depth: usize) -> Result<HpReport> {
    let s = disc_order_search(map, p, depth)?;
    let hp = 2 * s.order - 2;
    let critical = s.order >= 2 && p.iter().any(|v| v.norm() > 0.0);
    let weierstrass_order = if critical {
        foliation_prepare(map, p, depth, 0).ok().map(|c| c.weierstrass_order)
    } else {
        None
    };
    Ok(HpReport {
        point: p.to_vec(),
        disc_order: s.order,
        hp,
        incomplete: s.incomplete,
        consistent: weierstrass_order.is_none_or(|m| 2 * m <= hp),
        weierstrass_order,
    })
}

/// Summary emitted by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct TypeReport {
    pub n: usize,
    pub d: u32,
    pub t: usize,
    pub t_mode: String,
    pub t_incomplete: bool,
    pub s_num: u64,
    pub s_den: u64,
    pub catlin_type: u64,
    pub kernel_max_dim: usize,
    pub witnesses: Vec<Vec<[f64; 2]>>,
}

pub fn type_report(map: &PolyMap, opts: &TOptions) -> Result<TypeReport> {
    let cert = critical_kernel_certificate(map, opts.locus_samples, opts.seed)?;
    let t = t_invariant_with(map, opts, &cert)?;
    let s = sharp_order(map, t.value, &cert)?;
    let witnesses = t
        .points
        .iter()
        .map(|p| p.point.iter().map(|v| [v.re, v.im]).collect())
        .collect();
    Ok(TypeReport {
        n: map.n(),
        d: map.degree(),
        t: t.value,
        t_mode: t.mode.label(),
        t_incomplete: t.incomplete,
        s_num: s.s_num,
        s_den: s.s_den,
        catlin_type: s.catlin_type,
        kernel_max_dim: cert.max_kernel_dim,
        witnesses,
    })
}
