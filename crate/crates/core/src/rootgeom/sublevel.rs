use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cluster::{greedy_cluster, FiniteMetricSpace};
use crate::error::{Error, Result};
use crate::linalg::poly_roots;

/// Roots closer than this are merged into one root with summed multiplicity.
pub const ROOT_MERGE_TOL: f64 = 1e-7;

/// Upper bound on the doubling search for the cluster constant `K`.
const MAX_K_DOUBLINGS: u32 = 400;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub at: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectedRoot {
    pub at: Complex64,
    pub radius: f64,
}

/// Selected roots and radii controlling the sublevel sets of `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootClusterCover {
    /// Coefficients of `P`, constant term first.
    pub coefficients: Vec<Complex64>,
    pub degree: usize,
    pub leading_modulus: f64,
    pub roots: Vec<Root>,
    pub selected: Vec<SelectedRoot>,
    /// The cluster constant `K` chosen at each recursion level that split.
    pub split_constants: Vec<f64>,
}

impl RootClusterCover {
    /// `|P(z)|` in factored form, which stays accurate next to the roots.
    pub fn abs_p(&self, z: Complex64) -> f64 {
        self.roots.iter().fold(self.leading_modulus, |acc, r| {
            acc * (z - r.at).norm().powi(r.multiplicity as i32)
        })
    }
}

/// Builds the recursive root-cluster cover of a polynomial whose roots lie
/// in `D(0, 1/2)`.
pub fn sublevel_decomposition(coefficients: &[Complex64]) -> Result<RootClusterCover> {
    let coeffs = trimmed(coefficients)?;
    let d = coeffs.len() - 1;
    let lead = coeffs[d].norm();
    let roots = group_roots(&poly_roots(&coeffs)?);
    if let Some(bad) = roots.iter().find(|r| r.at.norm() >= 0.5) {
        return Err(Error::hypothesis_at(
            format!("root {} lies outside D(0, 1/2)", bad.at),
            vec![bad.at],
        ));
    }
    let mut split_constants = Vec::new();
    let selected = decompose(&roots, lead, d, &mut split_constants)?;
    Ok(RootClusterCover {
        coefficients: coeffs,
        degree: d,
        leading_modulus: lead,
        roots,
        selected,
        split_constants,
    })
}

fn trimmed(coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c = coefficients.to_vec();
    while c.last().is_some_and(|v| *v == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        return Err(Error::InvalidInput("zero polynomial".into()));
    }
    if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    Ok(c)
}

/// Single-linkage grouping of nearly coincident roots.
pub fn group_roots(raw: &[Complex64]) -> Vec<Root> {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (raw[i] - raw[j]).norm() < ROOT_MERGE_TOL {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(raw[i]);
    }
    groups
        .into_values()
        .map(|g| Root {
            at: g.iter().sum::<Complex64>() / g.len() as f64,
            multiplicity: g.len(),
        })
        .collect()
}

fn decompose(roots: &[Root], a: f64, d: usize, ks: &mut Vec<f64>) -> Result<Vec<SelectedRoot>> {
    if roots.is_empty() || d == 0 {
        return Ok(Vec::new());
    }
    let l = a.powf(-1.0 / (d as f64 + 1.0));
    let pts: Vec<Complex64> = roots.iter().map(|r| r.at).collect();
    let space = FiniteMetricSpace::from_points(&pts)?;
    let cover = greedy_cluster(&space, l)?;
    if cover.centers.len() == 1 {
        return Ok(vec![SelectedRoot {
            at: pts[cover.centers[0]],
            radius: cover.radii[0],
        }]);
    }
    // clusters[c] = roots covered by center c
    let mut clusters: Vec<Vec<Root>> = vec![Vec::new(); cover.centers.len()];
    for (i, r) in roots.iter().enumerate() {
        let c = cover
            .covering_center(&space, i)
            .ok_or_else(|| Error::Numerical("root left uncovered by cluster cover".into()))?;
        clusters[c].push(*r);
    }
    let degrees: Vec<usize> = clusters
        .iter()
        .map(|c| c.iter().map(|r| r.multiplicity).sum())
        .collect();
    let mut k = 1.0;
    for _ in 0..MAX_K_DOUBLINGS {
        let mut out = Vec::new();
        let mut sub_ks = Vec::new();
        let mut ok = true;
        for (ci, cluster) in clusters.iter().enumerate() {
            let s = pts[cover.centers[ci]];
            let mut a_s = k * a;
            for (cj, &dj) in degrees.iter().enumerate() {
                if cj != ci {
                    a_s *= (pts[cover.centers[cj]] - s).norm().powi(dj as i32);
                }
            }
            let sub = decompose(cluster, a_s, degrees[ci], &mut sub_ks)?;
            if sub.iter().any(|z| z.radius > cover.radii[ci] / 4.0) {
                ok = false;
                break;
            }
            out.extend(sub);
        }
        if ok {
            ks.push(k);
            ks.extend(sub_ks);
            return Ok(out);
        }
        k *= 2.0;
    }
    Err(Error::Numerical(
        "no admissible cluster constant found".into(),
    ))
}

/// Smallest constants making the three sublevel properties hold on the
/// sampled points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SublevelConstants {
    /// `max r_ζ · A^{1/(d+1)}`
    pub k1: f64,
    /// `max |P| r_ζ` over `D(ζ, 4 r_ζ)`
    pub k2: f64,
    /// `max A^{1/(d+1)} / |P|` off the discs `D(ζ, 2 r_ζ)`
    pub k3: f64,
}

/// Measures the sublevel constants of a cover on a uniform grid with `grid`
/// points per side, refined by local grids on every disc `D(ζ, 4r_ζ)` and by
/// samples on the circles `|z - ζ| = 2 r_ζ`.
///
/// The lower bound off the discs is a statement on the whole plane. The grid
/// covers `D(0, 1)` and, when the discs reach beyond it, the disc of twice
/// their outer extent; `|P|` only grows further out.
pub fn verify_sublevel(cover: &RootClusterCover, grid: usize) -> SublevelConstants {
    let grid = grid.max(8);
    let d = cover.degree as f64;
    let scale = cover.leading_modulus.powf(1.0 / (d + 1.0));
    let k1 = cover
        .selected
        .iter()
        .map(|s| s.radius * scale)
        .fold(0.0, f64::max);

    let outside = |z: Complex64| {
        cover
            .selected
            .iter()
            .all(|s| (z - s.at).norm() >= 2.0 * s.radius)
    };
    let mut k2 = 0.0f64;
    let mut k3 = 0.0f64;
    let extent = cover
        .selected
        .iter()
        .map(|s| 2.0 * (s.at.norm() + 4.0 * s.radius))
        .fold(1.0, f64::max);
    let mut visit_k3 = |z: Complex64| {
        if z.norm() < extent && outside(z) {
            k3 = k3.max(scale / cover.abs_p(z));
        }
    };
    for z in square_grid(Complex64::new(0.0, 0.0), extent, grid) {
        visit_k3(z);
    }
    for s in &cover.selected {
        for z in square_grid(s.at, 4.0 * s.radius, grid) {
            visit_k3(z);
        }
        let m = 8 * grid;
        for j in 0..m {
            let z = s.at + Complex64::from_polar(2.0 * s.radius, 2.0 * PI * j as f64 / m as f64);
            visit_k3(z);
        }
    }
    for s in &cover.selected {
        let mut visit_k2 = |z: Complex64| {
            if (z - s.at).norm() < 4.0 * s.radius {
                k2 = k2.max(cover.abs_p(z) * s.radius);
            }
        };
        for z in square_grid(s.at, 4.0 * s.radius, grid) {
            visit_k2(z);
        }
        let m = 8 * grid;
        for j in 0..m {
            let z = s.at
                + Complex64::from_polar(4.0 * s.radius * (1.0 - 1e-12), 2.0 * PI * j as f64 / m as f64);
            visit_k2(z);
        }
    }
    SublevelConstants { k1, k2, k3 }
}

fn square_grid(center: Complex64, radius: f64, n: usize) -> impl Iterator<Item = Complex64> {
    let h = 2.0 * radius / n as f64;
    (0..n).flat_map(move |i| {
        (0..n).map(move |j| {
            center
                + Complex64::new(
                    -radius + (i as f64 + 0.5) * h,
                    -radius + (j as f64 + 0.5) * h,
                )
        })
    })
}

/// One polynomial of a sublevel sweep with its measured constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRecord {
    pub degree: usize,
    pub leading_modulus: f64,
    pub constants: SublevelConstants,
}

/// Random sweep in matched pairs.
///
/// Each pair consists of a polynomial with `A ∈ [10², 10⁴]` and its exact
/// rescaling `P(λ⁻¹ ·)·λ^{d+1}`-type twin with `A ∈ [10⁴, 10⁶]`; the
/// construction is covariant under that rescaling, so comparing halves
/// isolates growth in `A` from configuration-to-configuration variance.
/// Degrees are drawn from `1..=max_degree`, roots uniformly from
/// `D(0, 0.45)`.
pub fn sublevel_sweep(pairs: usize, max_degree: usize, grid: usize, seed: u64) -> Result<Vec<SweepRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * pairs);
    for _ in 0..pairs {
        let d = rng.random_range(1..=max_degree);
        let a_lo = 10f64.powf(rng.random_range(2.0..4.0));
        let phase = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        let roots: Vec<Complex64> = (0..d)
            .map(|_| {
                let r = 0.45 * rng.random::<f64>().sqrt();
                Complex64::from_polar(r, rng.random_range(0.0..2.0 * PI))
            })
            .collect();
        let lambda = 100f64.powf(-1.0 / (d as f64 + 1.0));
        let twin_roots: Vec<Complex64> = roots.iter().map(|r| r * lambda).collect();
        for (rs, a) in [(roots, a_lo), (twin_roots, a_lo * 100.0)] {
            let coeffs = crate::linalg::poly_from_roots(&rs, phase * a);
            let cover = sublevel_decomposition(&coeffs)?;
            out.push(SweepRecord {
                degree: d,
                leading_modulus: a,
                constants: verify_sublevel(&cover, grid),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_gives_empty_cover() {
        let cover = sublevel_decomposition(&[c(5.0)]).unwrap();
        assert!(cover.selected.is_empty());
        let k = verify_sublevel(&cover, 32);
        assert!((k.k3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_is_single_cluster() {
        let a = 1e4;
        let mut coeffs = vec![c(0.0); 4];
        coeffs[3] = c(a);
        let cover = sublevel_decomposition(&coeffs).unwrap();
        assert_eq!(cover.selected.len(), 1);
        assert!((cover.selected[0].radius - a.powf(-0.25)).abs() < 1e-12);
        assert!(cover.selected[0].at.norm() < 1e-12);
    }

    #[test]
    fn roots_outside_half_disc_rejected() {
        let coeffs = crate::linalg::poly_from_roots(&[c(0.7)], c(10.0));
        assert!(matches!(
            sublevel_decomposition(&coeffs),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn double_root_is_grouped() {
        let coeffs = crate::linalg::poly_from_roots(&[c(0.1), c(0.1), c(-0.2)], c(1.0));
        let cover = sublevel_decomposition(&coeffs).unwrap();
        let mut mults: Vec<usize> = cover.roots.iter().map(|r| r.multiplicity).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 2]);
    }
}
