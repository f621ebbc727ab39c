//! Bridge to the faer linear-algebra kernels.
//!
//! Everything here is crate-internal plumbing: dense conversions, LU and
//! SVD solves, and eigendecompositions. Public numerics (operators,
//! superoperators, solvers) are expressed in ndarray types; faer matrices
//! never leak out of this module.

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64 as C64;
use std::sync::Once;

static FAER_INIT: Once = Once::new();

/// Pin faer to sequential execution. Parallelism in this crate comes from
/// mapping over independent parameter points, and per-solve determinism is
/// part of the output contract.
pub(crate) fn init_faer() {
    FAER_INIT.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

pub(crate) fn nd_to_faer(a: ArrayView2<C64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub(crate) fn faer_to_nd(m: faer::MatRef<c64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending, the
/// k-th column of the returned matrix is the k-th eigenvector.
pub(crate) fn herm_eig(a: ArrayView2<C64>) -> Result<(Vec<f64>, Array2<C64>), String> {
    init_faer();
    let m = nd_to_faer(a);
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| format!("hermitian eigendecomposition failed: {e:?}"))?;
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let s = evd.S();
    order.sort_by(|&i, &j| s[i].re.partial_cmp(&s[j].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| s[i].re).collect();
    let u = evd.U();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues of a general complex matrix.
pub(crate) fn complex_eigenvalues(a: ArrayView2<C64>) -> Result<Vec<C64>, String> {
    init_faer();
    let m = nd_to_faer(a);
    m.eigenvalues()
        .map_err(|e| format!("eigendecomposition failed: {e:?}"))
}

/// Sparse complex matrix in faer's compressed-column format, assembled
/// from (row, col, value) triplets. Duplicate entries are summed.
pub(crate) fn sparse_from_triplets(
    nrows: usize,
    ncols: usize,
    trips: &[(usize, usize, C64)],
) -> Result<SparseColMat<usize, c64>, String> {
    let t: Vec<Triplet<usize, usize, c64>> = trips
        .iter()
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    SparseColMat::try_new_from_triplets(nrows, ncols, &t)
        .map_err(|e| format!("sparse assembly failed: {e:?}"))
}

/// Direct sparse LU solve with two rounds of iterative refinement.
pub(crate) fn solve_sparse(
    mat: &SparseColMat<usize, c64>,
    rhs: &[C64],
) -> Result<Vec<C64>, String> {
    init_faer();
    let n = mat.nrows();
    let lu = mat
        .sp_lu()
        .map_err(|e| format!("sparse LU failed: {e:?}"))?;
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let mut x = lu.solve(&b);
    for _ in 0..2 {
        let r = &b - mat.as_ref() * x.as_ref();
        if r.norm_l2() == 0.0 {
            break;
        }
        let dx = lu.solve(&r);
        x += dx;
    }
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}

/// Right-singular vector of the smallest singular value, together with the
/// two smallest singular values (for nullspace-degeneracy detection).
pub(crate) fn smallest_singular_vector(
    a: ArrayView2<C64>,
) -> Result<(Vec<C64>, f64, f64), String> {
    init_faer();
    let m = nd_to_faer(a);
    let svd = m
        .svd()
        .map_err(|e| format!("svd failed: {e:?}"))?;
    let n = a.ncols();
    let s = svd.S();
    let smin = s[n - 1].re;
    let ssecond = if n >= 2 { s[n - 2].re } else { f64::INFINITY };
    let v = svd.V();
    let vec: Vec<C64> = (0..n).map(|i| v[(i, n - 1)]).collect();
    Ok((vec, smin, ssecond))
}

/// Dense LU solve of a real square system (used by the Lorentzian fitter).
pub(crate) fn solve_dense_real(a: &Array2<f64>, rhs: &[f64]) -> Result<Vec<f64>, String> {
    init_faer();
    let n = a.nrows();
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    let lu = m.partial_piv_lu();
    // faer does not report exact singularity from partial-pivot LU; detect it
    // from the U diagonal instead.
    let u = lu.U();
    for i in 0..n {
        if u[(i, i)].abs() < f64::MIN_POSITIVE {
            return Err("singular normal equations".into());
        }
    }
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    Ok((0..n).map(|i| x[(i, 0)]).collect())
}
