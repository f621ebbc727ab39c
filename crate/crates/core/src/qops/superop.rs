//! Sparse superoperators acting on column-vectorized density matrices.
//!
//! Column-stacking convention throughout: vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

use super::linalg;
use super::{Operator, QopsError, SpaceLayout};
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Sparse linear map on the n²-dimensional vectorized operator space.
#[derive(Debug, Clone)]
pub struct SuperOp {
    layout: SpaceLayout,
    mat: faer::sparse::SparseColMat<usize, faer::c64>,
}

impl SuperOp {
    /// Dimension of the vectorized space (n²).
    pub fn dim(&self) -> usize {
        self.layout.total_dim() * self.layout.total_dim()
    }

    /// Dimension n of the underlying Hilbert space.
    pub fn basis_dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub(crate) fn matrix(&self) -> &faer::sparse::SparseColMat<usize, faer::c64> {
        &self.mat
    }

    pub fn nnz(&self) -> usize {
        self.mat.compute_nnz()
    }

    /// Apply to a vectorized operator.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let n2 = self.dim();
        assert_eq!(x.len(), n2);
        let mut y = vec![C64::new(0.0, 0.0); n2];
        self.apply_into(x, &mut y);
        y
    }

    /// Apply without allocating; `y` is overwritten.
    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for v in y.iter_mut() {
            *v = C64::new(0.0, 0.0);
        }
        let sym = self.mat.symbolic();
        for col in 0..self.mat.ncols() {
            let xv = x[col];
            if xv == C64::new(0.0, 0.0) {
                continue;
            }
            let rows = sym.row_idx_of_col_raw(col);
            let vals = self.mat.val_of_col(col);
            for (r, v) in rows.iter().zip(vals.iter()) {
                y[*r] += *v * xv;
            }
        }
    }

    /// L(ρ) as a matrix.
    pub fn apply_to_matrix(&self, rho: &Array2<C64>) -> Array2<C64> {
        let n = self.basis_dim();
        let v = super::vectorize(rho.view());
        let out = self.apply(&v);
        super::unvectorize(n, &out)
    }

    /// Densified copy, for spectral diagnostics on small systems.
    pub fn to_dense(&self) -> Array2<C64> {
        let n2 = self.dim();
        let mut out = Array2::zeros((n2, n2));
        let sym = self.mat.symbolic();
        for col in 0..n2 {
            let rows = sym.row_idx_of_col_raw(col);
            let vals = self.mat.val_of_col(col);
            for (r, v) in rows.iter().zip(vals.iter()) {
                out[(*r, col)] += *v;
            }
        }
        out
    }

    /// Frobenius norm of the sparse matrix.
    pub fn norm_frobenius(&self) -> f64 {
        let mut acc = 0.0;
        for col in 0..self.mat.ncols() {
            for v in self.mat.val_of_col(col) {
                acc += v.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Real parts of the diagonal (decay-rate scale diagnostics).
    pub fn diagonal_real(&self) -> Vec<f64> {
        let n2 = self.dim();
        let mut d = vec![0.0; n2];
        let sym = self.mat.symbolic();
        for col in 0..n2 {
            let rows = sym.row_idx_of_col_raw(col);
            let vals = self.mat.val_of_col(col);
            for (r, v) in rows.iter().zip(vals.iter()) {
                if *r == col {
                    d[col] += v.re;
                }
            }
        }
        d
    }

    /// Full complex spectrum of the densified generator. Intended for
    /// diagnostics and tests on small systems; cost grows as n⁶.
    pub fn eigenvalues(&self) -> Result<Vec<C64>, QopsError> {
        let dense = self.to_dense();
        linalg::complex_eigenvalues(dense.view()).map_err(QopsError::Backend)
    }
}

/// Accumulates superoperator triplets in the column-stacking convention.
pub(crate) struct SuperOpBuilder {
    layout: SpaceLayout,
    n: usize,
    trips: Vec<(usize, usize, C64)>,
}

impl SuperOpBuilder {
    pub(crate) fn new(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, n, trips: Vec::new() }
    }

    /// scale · (A ρ): entries A[r,r'] δ_{cc'}.
    pub(crate) fn add_left(&mut self, a: &Array2<C64>, scale: C64) {
        let n = self.n;
        for r in 0..n {
            for rp in 0..n {
                let v = a[(r, rp)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    self.trips.push((c * n + r, c * n + rp, scale * v));
                }
            }
        }
    }

    /// scale · (ρ B): entries δ_{rr'} B[c',c].
    pub(crate) fn add_right(&mut self, b: &Array2<C64>, scale: C64) {
        let n = self.n;
        for cp in 0..n {
            for c in 0..n {
                let v = b[(cp, c)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..n {
                    self.trips.push((c * n + r, cp * n + r, scale * v));
                }
            }
        }
    }

    /// scale · (O ρ O†): entries O[r,r'] conj(O[c,c']).
    pub(crate) fn add_sandwich(&mut self, o: &Array2<C64>, scale: C64) {
        let n = self.n;
        let mut nz: Vec<(usize, usize, C64)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = o[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    nz.push((i, j, v));
                }
            }
        }
        for &(r, rp, v) in &nz {
            for &(c, cp, w) in &nz {
                self.trips.push((c * n + r, cp * n + rp, scale * v * w.conj()));
            }
        }
    }

    pub(crate) fn build(self) -> Result<SuperOp, QopsError> {
        let n2 = self.n * self.n;
        let mat = linalg::sparse_from_triplets(n2, n2, &self.trips).map_err(QopsError::Backend)?;
        Ok(SuperOp { layout: self.layout, mat })
    }
}

/// Lindblad generator L(ρ) = −i[H,ρ] + Σ (rate/2)·D(op) with
/// D(O) = 2OρO† − O†Oρ − ρO†O.
pub fn lindblad_super(
    h: &Operator,
    collapse: &[(f64, Operator)],
) -> Result<SuperOp, QopsError> {
    for (rate, op) in collapse {
        if *rate < 0.0 {
            return Err(QopsError::NegativeRate(*rate));
        }
        if op.layout() != h.layout() {
            return Err(QopsError::LayoutMismatch);
        }
    }
    let mut b = SuperOpBuilder::new(h.layout().clone());
    b.add_left(h.data(), C64::new(0.0, -1.0));
    b.add_right(h.data(), C64::new(0.0, 1.0));
    for (rate, op) in collapse {
        if *rate == 0.0 {
            continue;
        }
        let half = C64::new(rate / 2.0, 0.0);
        let odo = op.dag().data().dot(op.data());
        b.add_sandwich(op.data(), half * 2.0);
        b.add_left(&odo, -half);
        b.add_right(&odo, -half);
    }
    b.build()
}
