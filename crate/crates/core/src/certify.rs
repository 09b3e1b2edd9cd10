//! Certification of the three-variable quadratic example
//! `F(z) = (z₁² + z₂z₃, z₂² + z₁z₃, z₃²)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::Result;
use crate::polyalg::{MultiPoly, Order, PolyMap, VecJet};
use crate::typeinv::{
    critical_kernel_certificate, disc_order_search, disc_order_verify, sharp_order,
    t_invariant_with, TOptions,
};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn monomial(e: [u32; 3], coef: f64) -> (Vec<u32>, Complex64) {
    (e.to_vec(), c(coef))
}

/// The example map; `z2z3` scales the `z₂z₃` coefficient of the first
/// component (1 for the stock map).
pub fn example_map_with(z2z3: f64) -> PolyMap {
    let comps = vec![
        MultiPoly::from_terms(3, [monomial([2, 0, 0], 1.0), monomial([0, 1, 1], z2z3)]),
        MultiPoly::from_terms(3, [monomial([0, 2, 0], 1.0), monomial([1, 0, 1], 1.0)]),
        MultiPoly::from_terms(3, [monomial([0, 0, 2], 1.0)]),
    ]
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .expect("three-variable exponents");
    PolyMap::homogeneous(3, comps, 2).expect("quadratic components")
}

pub fn example_map() -> PolyMap {
    example_map_with(1.0)
}

/// `8z₁z₂z₃ − 2z₃³`.
pub fn expected_det() -> MultiPoly {
    MultiPoly::from_terms(3, [monomial([1, 1, 1], 8.0), monomial([0, 0, 3], -2.0)])
        .expect("three-variable exponents")
}

fn xi() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Intersection points of the line and the conic, and the three flex-type
/// points on the conic.
pub fn special_points() -> Vec<Vec<Complex64>> {
    let x = xi();
    vec![
        vec![c(1.0), c(0.0), c(0.0)],
        vec![c(0.0), c(1.0), c(0.0)],
        vec![c(1.0), c(1.0), c(2.0)],
        vec![c(1.0), x, 2.0 * x * x],
        vec![c(1.0), x * x, 2.0 * x],
    ]
}

/// A witness disc with its expected projective order.
#[derive(Clone, Debug)]
pub struct Witness {
    pub label: &'static str,
    pub disc: VecJet,
    pub order: usize,
}

/// One disc per point class: a generic point of the line `z₃ = 0`, a point
/// on the conic only, and the intersection point `(1, 0, 0)`.
pub fn witness_discs(k: usize) -> Vec<Witness> {
    let x = xi();
    let z = c(0.0);
    vec![
        Witness {
            label: "line point (1,1,0)",
            disc: VecJet::from_powers(k, 3, &[vec![c(1.0), c(1.0), z], vec![c(1.0), c(1.0), c(-2.0)]]),
            order: 2,
        },
        Witness {
            label: "conic point (1,xi^2,2xi)",
            disc: VecJet::from_powers(
                k,
                3,
                &[vec![c(1.0), x * x, 2.0 * x], vec![x, c(-1.0), z], vec![z, -x / 2.0, z]],
            ),
            order: 3,
        },
        Witness {
            label: "intersection point (1,0,0)",
            disc: VecJet::from_powers(
                k,
                3,
                &[vec![c(1.0), z, z], vec![z, c(1.0), z], vec![z, z, c(-1.0)], vec![c(0.5), z, z]],
            ),
            order: 4,
        },
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub found: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl ToString, found: impl ToString, pass: bool) -> Self {
        Check {
            name: name.into(),
            expected: expected.to_string(),
            found: found.to_string(),
            pass,
            note: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificationReport {
    pub pass: bool,
    /// First check that failed, if any.
    pub first_failure: Option<String>,
    pub checks: Vec<Check>,
    pub t: Option<usize>,
    pub s_num: Option<u64>,
    pub s_den: Option<u64>,
}

impl CertificationReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for ch in &self.checks {
            out.push_str(&format!(
                "[{}] {}: expected {}, found {}{}\n",
                if ch.pass { "ok" } else { "FAIL" },
                ch.name,
                ch.expected,
                ch.found,
                ch.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
            ));
        }
        out.push_str(if self.pass { "certification passed\n" } else { "certification FAILED\n" });
        out
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub depth: usize,
    pub locus_samples: usize,
    pub seed: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            depth: 8,
            locus_samples: 1000,
            seed: 0,
        }
    }
}

fn det_string(p: &MultiPoly) -> String {
    let mut terms: Vec<String> = p
        .terms()
        .map(|(e, v)| format!("({}{:+}i)z^{:?}", v.re, v.im, e.as_slice()))
        .collect();
    terms.sort();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Runs every check on `map`; checks after the first failure still run so the
/// report is complete, but `first_failure` names the earliest.
pub fn certify_map(map: &PolyMap, opts: &CertifyOptions) -> Result<CertificationReport> {
    let mut checks = Vec::new();
    let depth = opts.depth.max(1);

    let det = map.det_jacobian()?;
    let want = expected_det();
    let det_ok = det.num_terms() == want.num_terms()
        && want.terms().all(|(e, v)| det.coeff(e.as_slice()) == *v);
    checks.push(Check::new("det J", det_string(&want), det_string(&det), det_ok));

    let cert = critical_kernel_certificate(map, opts.locus_samples, opts.seed)?;
    checks.push(Check::new(
        format!("max dim ker J on {} locus points", cert.locus_points),
        1,
        cert.max_kernel_dim,
        cert.max_kernel_dim == 1 && cert.locus_points > 0,
    ));

    let mut witness_max = 1;
    for w in witness_discs(depth) {
        let o = disc_order_verify(map, &w.disc, depth)?;
        let (found, note) = match o.projective {
            Some(Order::Finite(k)) => (k.to_string(), None),
            Some(Order::Infinite { truncation }) => (
                format!("> {truncation}"),
                Some(format!("search incomplete at depth {truncation}")),
            ),
            None => ("singular".into(), None),
        };
        let pass = o.projective == Some(Order::Finite(w.order));
        if pass {
            witness_max = witness_max.max(w.order);
        }
        let mut ch = Check::new(format!("witness order at {}", w.label), w.order, found, pass);
        ch.note = note;
        checks.push(ch);
    }

    for (p, want) in special_points().iter().zip([4, 4, 3, 3, 3]) {
        let s = disc_order_search(map, p, depth)?;
        let found = if s.incomplete {
            format!(">= {}", s.order)
        } else {
            s.order.to_string()
        };
        let mut ch = Check::new(
            format!("searched order at {}", fmt_point(p)),
            want,
            found,
            s.order == want && !s.incomplete,
        );
        if s.incomplete {
            ch.note = Some(format!("search incomplete at depth {depth}"));
        }
        checks.push(ch);
    }

    let mut topts = TOptions::for_map(map);
    topts.depth = depth;
    topts.locus_samples = opts.locus_samples;
    topts.seed = opts.seed;
    topts.special_points = special_points();
    let tinv = t_invariant_with(map, &topts, &cert)?;
    let t = tinv.value.max(witness_max);
    let mut ch = Check::new("t", 4, t, t == 4 && !tinv.incomplete);
    if tinv.incomplete {
        ch.note = Some("search incomplete".into());
    }
    checks.push(ch);

    let (s_num, s_den) = match sharp_order(map, t, &cert) {
        Ok(s) => {
            let r = s.ratio();
            checks.push(Check::new("s", "1/8", format!("{}/{}", r.numer(), r.denom()), r == Ratio::new(1, 8)));
            (Some(s.s_num), Some(s.s_den))
        }
        Err(e) => {
            checks.push(Check::new("s", "1/8", format!("refused: {e}"), false));
            (None, None)
        }
    };

    let first_failure = checks.iter().find(|c| !c.pass).map(|c| c.name.clone());
    Ok(CertificationReport {
        pass: first_failure.is_none(),
        first_failure,
        checks,
        t: Some(t),
        s_num,
        s_den,
    })
}

pub fn certify_example(opts: &CertifyOptions) -> Result<CertificationReport> {
    certify_map(&example_map(), opts)
}

fn fmt_point(p: &[Complex64]) -> String {
    let parts: Vec<String> = p
        .iter()
        .map(|v| {
            if v.im.abs() < 1e-12 {
                format!("{}", v.re)
            } else {
                format!("{:.3}{:+.3}i", v.re, v.im)
            }
        })
        .collect();
    format!("({})", parts.join(","))
}
