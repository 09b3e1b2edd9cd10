use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed in the triangle inequality when validating distances.
const TRIANGLE_SLACK: f64 = 1e-12;

/// A finite metric space given by its distance matrix.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    pub fn new(dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidInput("metric space must be nonempty".into()));
        }
        let scale = dist
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidInput(format!("d({i},{i}) is not zero")));
            }
            for j in 0..n {
                let v = row[j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!("d({i},{j}) = {v} is invalid")));
                }
                if v != dist[j][i] {
                    return Err(Error::InvalidInput(format!("d({i},{j}) is not symmetric")));
                }
                for k in 0..n {
                    if v > dist[i][k] + dist[k][j] + TRIANGLE_SLACK * scale {
                        return Err(Error::InvalidInput(format!(
                            "triangle inequality fails for ({i},{k},{j})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { dist })
    }

    /// Points of the plane with the modulus distance.
    pub fn from_points(points: &[Complex64]) -> Result<Self> {
        let dist = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).norm()).collect())
            .collect();
        FiniteMetricSpace::new(dist)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }
}

/// Output of [`greedy_cluster`]: centers with their radii.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterCover {
    pub centers: Vec<usize>,
    pub radii: Vec<f64>,
    pub scale: f64,
}

impl ClusterCover {
    pub fn radius_of(&self, center: usize) -> Option<f64> {
        self.centers
            .iter()
            .position(|&c| c == center)
            .map(|i| self.radii[i])
    }

    /// Index into `centers` of the unique center covering `x`.
    pub fn covering_center(&self, space: &FiniteMetricSpace, x: usize) -> Option<usize> {
        self.centers
            .iter()
            .zip(&self.radii)
            .position(|(&s, &r)| space.d(x, s) <= r)
    }
}

/// Smallest `r` in `{L, 4L, ..., 4^{N-1} L}` such that no point lies at
/// distance in `(r, 4r]` from `x`.
pub fn choose_radius(space: &FiniteMetricSpace, x: usize, l: f64) -> f64 {
    let n = space.len();
    let mut r = l;
    for _ in 0..n {
        let blocked = (0..n).any(|s| {
            let d = space.d(x, s);
            r < d && d <= 4.0 * r
        });
        if !blocked {
            return r;
        }
        r *= 4.0;
    }
    // Pigeonhole: at most N-1 annuli can be occupied, so this is unreachable
    // in exact arithmetic; return the last candidate regardless.
    r / 4.0
}

/// Greedy cover: repeatedly take the remaining point with the largest
/// radius (lowest index on ties) and remove everything within that radius.
pub fn greedy_cluster(space: &FiniteMetricSpace, l: f64) -> Result<ClusterCover> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidInput("scale L must be positive".into()));
    }
    let n = space.len();
    let radii: Vec<f64> = (0..n).map(|x| choose_radius(space, x, l)).collect();
    let mut remaining = vec![true; n];
    let mut centers = Vec::new();
    let mut chosen_radii = Vec::new();
    while let Some(s) = (0..n)
        .filter(|&i| remaining[i])
        .fold(None, |best: Option<usize>, i| match best {
            Some(b) if radii[b] >= radii[i] => Some(b),
            _ => Some(i),
        })
    {
        let r = radii[s];
        for y in 0..n {
            if space.d(y, s) <= r {
                remaining[y] = false;
            }
        }
        centers.push(s);
        chosen_radii.push(r);
    }
    Ok(ClusterCover {
        centers,
        radii: chosen_radii,
        scale: l,
    })
}

/// Exhaustively checks the three cover properties, returning the first
/// violation found.
pub fn check_cover(space: &FiniteMetricSpace, cover: &ClusterCover) -> std::result::Result<(), String> {
    let n = space.len();
    let l = cover.scale;
    let upper = 4f64.powi(n as i32 - 1) * l;
    for (&s, &r) in cover.centers.iter().zip(&cover.radii) {
        if r < l || r > upper * (1.0 + 1e-12) {
            return Err(format!("radius {r} of center {s} outside [L, 4^(N-1) L]"));
        }
    }
    for a in 0..cover.centers.len() {
        for b in (a + 1)..cover.centers.len() {
            let (s, t) = (cover.centers[a], cover.centers[b]);
            if space.d(s, t) <= 2.0 * cover.radii[a] + 2.0 * cover.radii[b] {
                return Err(format!("centers {s} and {t} are not separated"));
            }
        }
    }
    for x in 0..n {
        let count = cover
            .centers
            .iter()
            .zip(&cover.radii)
            .filter(|(&s, &r)| space.d(x, s) <= r)
            .count();
        if count != 1 {
            return Err(format!("point {x} is covered by {count} centers"));
        }
    }
    Ok(())
}
