use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use super::grid::DiscGrid;
use super::weight::Weight;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Compressed sparse rows with complex entries.
#[derive(Clone, Debug)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<Complex64>,
}

impl Csr {
    /// Builds from per-row entry lists, summing repeated columns.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let start = cols.len();
            for (c, v) in row {
                if cols.len() > start && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Csr {
            nrows: row_ptr.len() - 1,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.nrows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// `A* x`
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.ncols];
        for (i, xi) in x.iter().enumerate() {
            for (j, v) in self.row(i) {
                out[j] += v.conj() * xi;
            }
        }
        out
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i).find(|e| e.0 == j).map_or(ZERO, |e| e.1)
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }
}

/// Discrete `∂/∂z̄ = ½(D_x + i D_y)`: centered differences where both
/// neighbors are active, first-order one-sided otherwise.
pub fn dbar_operator(grid: &DiscGrid) -> Csr {
    let h = grid.h;
    let rows = (0..grid.len())
        .map(|k| {
            let mut row = Vec::with_capacity(5);
            for (axis, scale) in [(0, Complex64::new(0.5, 0.0)), (1, Complex64::new(0.0, 0.5))] {
                match grid.neighbors(k, axis) {
                    (Some(m), Some(p)) => {
                        row.push((p, scale / (2.0 * h)));
                        row.push((m, -scale / (2.0 * h)));
                    }
                    (None, Some(p)) => {
                        row.push((p, scale / h));
                        row.push((k, -scale / h));
                    }
                    (Some(m), None) => {
                        row.push((k, scale / h));
                        row.push((m, -scale / h));
                    }
                    (None, None) => {}
                }
            }
            row
        })
        .collect();
    Csr::from_rows(grid.len(), rows)
}

/// Weighted form `∫|∂w/∂z̄|² e^{−2φ} + ∫V|w|² e^{−2φ}` over `∫|w|² e^{−2φ}`.
///
/// Stored in the unitary gauge `u = e^{−φ} w`, where the form reads
/// `‖(∂̄ + ∂̄φ) u‖² + ‖√V u‖²` and the mass is plain `‖u‖²`, so large
/// weights never enter as exponentials.
#[derive(Clone, Debug)]
pub struct WeightedFormAssembly {
    pub grid: DiscGrid,
    pub phi: Vec<f64>,
    pub dbar_phi: Vec<Complex64>,
    pub v: Vec<f64>,
    /// `∂̄ + ∂̄φ` on grid functions.
    pub op: Csr,
    /// Energy matrix divided by the cell area `h²`.
    pub energy: Csr,
}

fn check_fields(grid: &DiscGrid, phi: &[f64], v: &[f64]) -> Result<()> {
    for (name, len) in [("phi", phi.len()), ("V", v.len())] {
        if len != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{name} has {len} values for {} active points",
                grid.len()
            )));
        }
    }
    if let Some(k) = phi.iter().position(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("phi is not finite at {}", grid.point(k))));
    }
    if let Some(k) = v.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "V must be finite and nonnegative, got {} at {}",
            v[k],
            grid.point(k)
        )));
    }
    Ok(())
}

impl WeightedFormAssembly {
    /// Assembles from sampled `φ`; `∂̄φ` is taken with the same difference
    /// stencil as the form itself.
    pub fn new(grid: DiscGrid, phi: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        check_fields(&grid, &phi, &v)?;
        let d = dbar_operator(&grid);
        let phic: Vec<Complex64> = phi.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let dbar_phi = d.matvec(&phic);
        Ok(Self::build(grid, phi, dbar_phi, v, d))
    }

    /// Assembles from an analytic weight, using its exact `∂̄φ`.
    pub fn from_weight(grid: DiscGrid, weight: &dyn Weight, v: Vec<f64>) -> Result<Self> {
        let phi = grid.sample(|z| weight.value(z));
        check_fields(&grid, &phi, &v)?;
        let dbar_phi = grid.sample(|z| weight.dbar(z));
        if dbar_phi.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(Error::InvalidInput("weight gradient is not finite".into()));
        }
        let d = dbar_operator(&grid);
        Ok(Self::build(grid, phi, dbar_phi, v, d))
    }

    fn build(grid: DiscGrid, phi: Vec<f64>, dbar_phi: Vec<Complex64>, v: Vec<f64>, d: Csr) -> Self {
        let n = grid.len();
        let op_rows: Vec<Vec<(usize, Complex64)>> = (0..n)
            .map(|k| {
                let mut row: Vec<_> = d.row(k).collect();
                row.push((k, dbar_phi[k]));
                row
            })
            .collect();
        let op = Csr::from_rows(n, op_rows);
        // Energy = L* L + diag V, accumulated row by row of L.
        let mut rows: Vec<Vec<(usize, Complex64)>> = (0..n)
            .map(|k| vec![(k, Complex64::new(v[k], 0.0))])
            .collect();
        for r in 0..n {
            let entries: Vec<_> = op.row(r).collect();
            for &(a, va) in &entries {
                for &(b, vb) in &entries {
                    rows[a].push((b, va.conj() * vb));
                }
            }
        }
        let energy = Csr::from_rows(n, rows);
        WeightedFormAssembly {
            grid,
            phi,
            dbar_phi,
            v,
            op,
            energy,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Energy of `u` in the unitary gauge, with the `h²` quadrature weight.
    pub fn energy(&self, u: &[Complex64]) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        let lu = self.op.matvec(u);
        let grad: f64 = lu.iter().map(|x| x.norm_sqr()).sum();
        let pot: f64 = u.iter().zip(&self.v).map(|(x, v)| v * x.norm_sqr()).sum();
        h2 * (grad + pot)
    }

    pub fn mass(&self, u: &[Complex64]) -> f64 {
        self.grid.l2_sq(u)
    }

    pub fn rayleigh(&self, u: &[Complex64]) -> f64 {
        self.energy(u) / self.mass(u)
    }

    pub fn to_unitary(&self, w: &[Complex64]) -> Vec<Complex64> {
        w.iter().zip(&self.phi).map(|(x, p)| x * (-p).exp()).collect()
    }

    pub fn energy_w(&self, w: &[Complex64]) -> f64 {
        self.energy(&self.to_unitary(w))
    }

    pub fn mass_w(&self, w: &[Complex64]) -> f64 {
        self.mass(&self.to_unitary(w))
    }

    /// Diagonal of the mass matrix (`h²` on every active point).
    pub fn mass_diagonal(&self) -> Vec<f64> {
        vec![self.grid.h * self.grid.h; self.len()]
    }

    /// Largest `|E_ab − conj(E_ba)|` relative to the largest entry.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.energy.vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for a in 0..self.len() {
            for (b, v) in self.energy.row(a) {
                worst = worst.max((v - self.energy.get(b, a).conj()).norm());
            }
        }
        worst / scale.max(f64::MIN_POSITIVE)
    }

    /// `E/h² − σ I` as a faer matrix for factorization.
    pub(crate) fn shifted_energy(&self, sigma: f64) -> Result<SparseColMat<usize, Complex64>> {
        let n = self.len();
        let mut t = Vec::with_capacity(self.energy.nnz());
        for a in 0..n {
            for (b, v) in self.energy.row(a) {
                let v = if a == b { v - sigma } else { v };
                t.push(Triplet::new(a, b, v));
            }
        }
        SparseColMat::try_new_from_triplets(n, n, &t)
            .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))
    }

    /// `(E/h²) x`
    pub(crate) fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.energy.matvec(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn flat(n: usize) -> WeightedFormAssembly {
        let g = DiscGrid::unit(n).unwrap();
        let len = g.len();
        WeightedFormAssembly::new(g, vec![0.0; len], vec![0.0; len]).unwrap()
    }

    #[test]
    fn holomorphic_has_no_energy() {
        let a = flat(128);
        let w = a.grid.sample(|z| z);
        assert!(a.energy_w(&w) < 1e-3);
    }

    #[test]
    fn conjugate_energy_is_area() {
        let a = flat(256);
        let w = a.grid.sample(|z| z.conj());
        assert!((a.energy_w(&w) - PI).abs() < 0.02 * PI);
        let one = vec![Complex64::new(1.0, 0.0); a.len()];
        assert!((a.mass_w(&one) - PI).abs() < 0.02 * PI);
    }

    #[test]
    fn negative_potential_rejected() {
        let g = DiscGrid::unit(32).unwrap();
        let mut v = vec![0.0; g.len()];
        v[3] = -1.0;
        let len = g.len();
        assert!(WeightedFormAssembly::new(g, vec![0.0; len], v).is_err());
    }

    #[test]
    fn energy_matrix_matches_form() {
        let g = DiscGrid::unit(24).unwrap();
        let phi = g.sample(|z| z.norm_sqr() + 0.3 * z.re);
        let v = g.sample(|z| z.im.abs());
        let a = WeightedFormAssembly::new(g, phi, v).unwrap();
        assert!(a.hermitian_defect() < 1e-14);
        let u = a.grid.sample(|z| Complex64::new(z.re.sin(), z.im * z.re));
        let eu = a.apply(&u);
        let q: Complex64 = u.iter().zip(&eu).map(|(x, y)| x.conj() * y).sum();
        let h2 = a.grid.h * a.grid.h;
        assert!((q.re * h2 - a.energy(&u)).abs() < 1e-12 * a.energy(&u));
        assert!(q.im.abs() < 1e-10 * q.re);
    }
}
