//! Operators on composite Hilbert spaces.
//!
//! A [`SpaceLayout`] names the tensor factors (emitter ⊗ cavity ⊗ sensors…)
//! and fixes the basis ordering: the basis index runs over factor
//! occupations with the first factor slowest, matching the Kronecker
//! product A ⊗ B ⊗ C. [`Operator`] is a dense complex matrix tagged with
//! its layout; superoperators live in [`superop`].

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;
use thiserror::Error;

pub(crate) mod linalg;
mod superop;

pub use superop::{lindblad_super, SuperOp};

#[derive(Debug, Error)]
pub enum QopsError {
    #[error("duplicate factor name `{0}` in layout")]
    DuplicateFactor(String),
    #[error("factor dimension must be positive, `{name}` has dim {dim}")]
    ZeroDim { name: String, dim: usize },
    #[error("unknown factor `{0}`")]
    UnknownFactor(String),
    #[error("dimension mismatch: operator is {got}×{got}, factor `{name}` has dim {want}")]
    FactorDimMismatch { name: String, got: usize, want: usize },
    #[error("matrix shape {rows}×{cols} does not match layout dim {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },
    #[error("operators live on different layouts")]
    LayoutMismatch,
    #[error("matrix is not Hermitian: max |A - A†| = {0:.3e}")]
    NotHermitian(f64),
    #[error("negative collapse rate {0}")]
    NegativeRate(f64),
    #[error("linear algebra backend: {0}")]
    Backend(String),
}

/// Ordered tensor-factor structure of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceLayout {
    factors: Vec<(String, usize)>,
    total_dim: usize,
}

impl SpaceLayout {
    pub fn new<S: Into<String>>(factors: Vec<(S, usize)>) -> Result<Self, QopsError> {
        let factors: Vec<(String, usize)> =
            factors.into_iter().map(|(n, d)| (n.into(), d)).collect();
        for (i, (name, dim)) in factors.iter().enumerate() {
            if *dim == 0 {
                return Err(QopsError::ZeroDim { name: name.clone(), dim: *dim });
            }
            if factors[..i].iter().any(|(n, _)| n == name) {
                return Err(QopsError::DuplicateFactor(name.clone()));
            }
        }
        let total_dim = factors.iter().map(|(_, d)| d).product();
        Ok(Self { factors, total_dim })
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn factors(&self) -> &[(String, usize)] {
        &self.factors
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.factors.iter().position(|(n, _)| n == name)
    }

    pub fn dim_of(&self, name: &str) -> Option<usize> {
        self.factors.iter().find(|(n, _)| n == name).map(|(_, d)| *d)
    }

    /// Occupation of the `pos`-th factor in the given basis index.
    pub fn occupation(&self, basis_index: usize, pos: usize) -> usize {
        let mut idx = basis_index;
        for (_, d) in self.factors.iter().skip(pos + 1).rev() {
            idx /= d;
        }
        idx % self.factors[pos].1
    }

    /// Layout extended by extra factors appended on the right.
    pub fn extended<S: Into<String>>(&self, extra: Vec<(S, usize)>) -> Result<Self, QopsError> {
        let mut factors: Vec<(String, usize)> = self.factors.clone();
        factors.extend(extra.into_iter().map(|(n, d)| (n.into(), d)));
        SpaceLayout::new(factors)
    }
}

/// Dense complex matrix on a composite space.
#[derive(Debug, Clone)]
pub struct Operator {
    layout: SpaceLayout,
    data: Array2<C64>,
}

impl Operator {
    pub fn from_dense(layout: SpaceLayout, data: Array2<C64>) -> Result<Self, QopsError> {
        let n = layout.total_dim();
        if data.nrows() != n || data.ncols() != n {
            return Err(QopsError::ShapeMismatch { rows: data.nrows(), cols: data.ncols(), dim: n });
        }
        Ok(Self { layout, data })
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, data: Array2::from_diag_elem(n, C64::new(1.0, 0.0)) }
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, data: Array2::zeros((n, n)) }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// Hermitian conjugate.
    pub fn dag(&self) -> Self {
        let n = self.dim();
        let data = Array2::from_shape_fn((n, n), |(i, j)| self.data[(j, i)].conj());
        Self { layout: self.layout.clone(), data }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { layout: self.layout.clone(), data: self.data.mapv(|v| v * factor) }
    }

    /// Max elementwise |A - A†|.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[(i, j)] - self.data[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Tr[self · m].
    pub fn trace_with(&self, m: &Array2<C64>) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.data[(i, j)] * m[(j, i)];
            }
        }
        acc
    }

    /// Promote to a layout with extra factors appended: self ⊗ I.
    pub fn extend_with(&self, extended: &SpaceLayout) -> Result<Self, QopsError> {
        let base = self.layout.factors().len();
        if extended.factors()[..base] != *self.layout.factors() {
            return Err(QopsError::LayoutMismatch);
        }
        let extra_dim: usize = extended.factors()[base..].iter().map(|(_, d)| d).product();
        let eye = Array2::from_diag_elem(extra_dim, C64::new(1.0, 0.0));
        let data = kron(self.data.view(), eye.view());
        Operator::from_dense(extended.clone(), data)
    }
}

macro_rules! operator_binop {
    ($trait:ident, $fn:ident, $op:tt) => {
        impl std::ops::$trait for &Operator {
            type Output = Operator;
            fn $fn(self, rhs: &Operator) -> Operator {
                assert_eq!(self.layout, rhs.layout, "operator layout mismatch");
                Operator { layout: self.layout.clone(), data: &self.data $op &rhs.data }
            }
        }
    };
}
operator_binop!(Add, add, +);
operator_binop!(Sub, sub, -);

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.layout, rhs.layout, "operator layout mismatch");
        Operator { layout: self.layout.clone(), data: self.data.dot(&rhs.data) }
    }
}

/// Kronecker product of dense matrices.
pub fn kron(a: ArrayView2<C64>, b: ArrayView2<C64>) -> Array2<C64> {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let v = a[(i, j)];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = v * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Embed a local operator on one named factor: I ⊗ … ⊗ op ⊗ … ⊗ I.
pub fn embed(
    local: ArrayView2<C64>,
    factor: &str,
    layout: &SpaceLayout,
) -> Result<Operator, QopsError> {
    let pos = layout
        .position(factor)
        .ok_or_else(|| QopsError::UnknownFactor(factor.to_string()))?;
    let dim = layout.factors()[pos].1;
    if local.nrows() != dim || local.ncols() != dim {
        return Err(QopsError::FactorDimMismatch { name: factor.to_string(), got: local.nrows(), want: dim });
    }
    let before: usize = layout.factors()[..pos].iter().map(|(_, d)| d).product();
    let after: usize = layout.factors()[pos + 1..].iter().map(|(_, d)| d).product();
    let eye_b = Array2::from_diag_elem(before, C64::new(1.0, 0.0));
    let eye_a = Array2::from_diag_elem(after, C64::new(1.0, 0.0));
    let data = kron(kron(eye_b.view(), local).view(), eye_a.view());
    Operator::from_dense(layout.clone(), data)
}

/// Hermiticity tolerance used throughout: inputs are analytically Hermitian,
/// violations signal construction bugs.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues come out ascending; eigenvector columns are phase-fixed so
/// that the largest-magnitude component is real positive, which keeps
/// downstream constructions reproducible across backends.
pub fn eig_hermitian(op: &Operator) -> Result<(Vec<f64>, Array2<C64>), QopsError> {
    let res = op.hermiticity_residual();
    if res > HERMITICITY_TOL {
        return Err(QopsError::NotHermitian(res));
    }
    let (values, mut vectors) = linalg::herm_eig(op.data().view()).map_err(QopsError::Backend)?;
    let n = op.dim();
    for j in 0..n {
        let mut imax = 0;
        let mut best = 0.0f64;
        for i in 0..n {
            let m = vectors[(i, j)].norm();
            if m > best {
                best = m;
                imax = i;
            }
        }
        if best > 0.0 {
            let phase = vectors[(imax, j)] / C64::new(best, 0.0);
            let correction = phase.conj();
            for i in 0..n {
                vectors[(i, j)] *= correction;
            }
        }
    }
    Ok((values, vectors))
}

/// Bosonic annihilation operator on a truncated Fock space of dimension `dim`.
pub fn annihilation(dim: usize) -> Array2<C64> {
    let mut a = Array2::zeros((dim, dim));
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// a†a on a truncated Fock space.
pub fn number_op(dim: usize) -> Array2<C64> {
    Array2::from_shape_fn((dim, dim), |(i, j)| {
        if i == j { C64::new(i as f64, 0.0) } else { C64::new(0.0, 0.0) }
    })
}

/// Two-level lowering operator |0⟩⟨1| (basis ordered ground, excited).
pub fn qubit_lower() -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[(0, 1)] = C64::new(1.0, 0.0);
    m
}

/// Two-level raising operator |1⟩⟨0|.
pub fn qubit_raise() -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[(1, 0)] = C64::new(1.0, 0.0);
    m
}

/// Two-level inversion operator diag(-1, +1).
pub fn qubit_z() -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[(0, 0)] = C64::new(-1.0, 0.0);
    m[(1, 1)] = C64::new(1.0, 0.0);
    m
}

/// |1⟩⟨1| on a two-level factor.
pub fn qubit_excited_projector() -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[(1, 1)] = C64::new(1.0, 0.0);
    m
}

/// vec(ρ) with column stacking: vec[c·n + r] = ρ[r, c].
pub fn vectorize(m: ArrayView2<C64>) -> Vec<C64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(n * n);
    for c in 0..n {
        for r in 0..n {
            v.push(m[(r, c)]);
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn unvectorize(n: usize, v: &[C64]) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(r, c)| v[c * n + r])
}
