//! Steady states, time propagation, and two-time correlation functions.

use crate::qops::{linalg, unvectorize, vectorize, Operator, SuperOp};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use thiserror::Error;

mod evolve;
mod two_time;

pub use evolve::{evolve, evolve_recording, EvolveOptions};
pub use two_time::{slowest_decay_rate, two_time, CorrelationKernel, CorrelationTrace};

/// Residual bound for steady-state solves: ‖L vec(ρ)‖₂ ≤ RESIDUAL_BOUND · ‖L‖_F.
/// Solves beyond the bound are hard errors, not warnings.
pub const RESIDUAL_BOUND: f64 = 1e-10;

/// Most negative eigenvalue a steady-state density matrix may carry before
/// the solve is rejected; anything in (−NEGATIVITY_FLOOR, 0) is clippable.
pub const NEGATIVITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("steady-state residual {residual:.3e} exceeds bound {bound:.3e}")]
    ResidualTooLarge { residual: f64, bound: f64 },
    #[error("steady state is degenerate: second singular value {0:.3e} is consistent with zero")]
    DegenerateSteadyState(f64),
    #[error("density matrix eigenvalue {0:.3e} below the negativity floor")]
    NonPositive(f64),
    #[error("vectorized state has zero trace")]
    ZeroTrace,
    #[error("step size underflow at t = {0:.6e}")]
    StepUnderflow(f64),
    #[error("taus must be ascending and start at 0")]
    BadTauGrid,
    #[error("linear algebra backend: {0}")]
    Backend(String),
    #[error(transparent)]
    Qops(#[from] crate::qops::QopsError),
}

/// Hermitian, unit-trace, (numerically) positive state on a layout.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    layout: crate::qops::SpaceLayout,
    data: Array2<C64>,
}

impl DensityMatrix {
    pub fn layout(&self) -> &crate::qops::SpaceLayout {
        &self.layout
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// ⟨O⟩ = Tr[O ρ].
    pub fn expectation(&self, op: &Operator) -> C64 {
        op.trace_with(&self.data)
    }

    /// Clip eigenvalues in (−NEGATIVITY_FLOOR, 0) to zero and renormalize;
    /// required before a steady state is reused as an initial condition.
    /// Larger negativity is an error.
    pub fn clip_negative_eigenvalues(&self) -> Result<Self, SolverError> {
        let (vals, v) = linalg::herm_eig(self.data.view()).map_err(SolverError::Backend)?;
        if let Some(&worst) = vals.first() {
            if worst <= -NEGATIVITY_FLOOR {
                return Err(SolverError::NonPositive(worst));
            }
        }
        let n = self.dim();
        let clipped: Vec<f64> = vals.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if total <= 0.0 {
            return Err(SolverError::ZeroTrace);
        }
        let mut data = Array2::<C64>::zeros((n, n));
        for k in 0..n {
            let w = clipped[k] / total;
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                for j in 0..n {
                    data[(i, j)] += C64::new(w, 0.0) * v[(i, k)] * v[(j, k)].conj();
                }
            }
        }
        Ok(Self { layout: self.layout.clone(), data })
    }
}

fn hermitize_and_normalize(n: usize, x: &[C64]) -> Result<Array2<C64>, SolverError> {
    let raw = unvectorize(n, x);
    let herm = Array2::from_shape_fn((n, n), |(i, j)| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5);
    let tr: C64 = (0..n).map(|i| herm[(i, i)]).sum();
    if tr.norm() < 1e-300 {
        return Err(SolverError::ZeroTrace);
    }
    Ok(herm.mapv(|v| v / tr.re))
}

fn residual_norm(l: &SuperOp, rho: &Array2<C64>) -> f64 {
    let v = vectorize(rho.view());
    l.apply(&v).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Steady state of Lρ = 0 with unit trace.
///
/// One row of the vectorized generator is replaced by the trace functional
/// and the square sparse system is solved directly; if the residual check
/// fails, a dense SVD nullspace solve takes over (and reports degeneracy
/// when the nullspace is more than one-dimensional).
pub fn steady_state(l: &SuperOp) -> Result<DensityMatrix, SolverError> {
    steady_state_scaled(l, None)
}

/// Steady state in similarity-scaled variables x̃ = D x with D = diag(scale).
///
/// The generator is transformed as D L D⁻¹, solved, and the result mapped
/// back. The physics is unchanged — this is an exact similarity — but a
/// grading that inflates weakly occupied sectors (sensor excitations) keeps
/// their components well above the double-precision noise floor.
pub fn steady_state_scaled(
    l: &SuperOp,
    scale: Option<&[f64]>,
) -> Result<DensityMatrix, SolverError> {
    let n = l.basis_dim();
    let n2 = l.dim();
    if let Some(s) = scale {
        assert_eq!(s.len(), n2, "scale vector length must equal the vectorized dim");
    }
    let d_of = |v: usize| scale.map_or(1.0, |s| s[v]);

    // modified triplets: row 0 → trace functional (in scaled variables)
    let mut trips: Vec<(usize, usize, C64)> = Vec::new();
    let sym = l.matrix().symbolic();
    for col in 0..n2 {
        let rows = sym.row_idx_of_col_raw(col);
        let vals = l.matrix().val_of_col(col);
        let dc = d_of(col);
        for (r, v) in rows.iter().zip(vals.iter()) {
            if *r == 0 {
                continue;
            }
            let w = C64::new(v.re, v.im) * (d_of(*r) / dc);
            trips.push((*r, col, w));
        }
    }
    for k in 0..n {
        let v = k * n + k;
        trips.push((0, v, C64::new(1.0 / d_of(v), 0.0)));
    }
    let mut rhs = vec![C64::new(0.0, 0.0); n2];
    rhs[0] = C64::new(1.0, 0.0);

    let norm_l = l.norm_frobenius();
    let bound = RESIDUAL_BOUND * norm_l;

    let direct = linalg::sparse_from_triplets(n2, n2, &trips)
        .and_then(|m| linalg::solve_sparse(&m, &rhs));
    if let Ok(xt) = direct {
        let x: Vec<C64> = xt
            .iter()
            .enumerate()
            .map(|(v, &val)| val / d_of(v))
            .collect();
        if let Ok(rho) = hermitize_and_normalize(n, &x) {
            let res = residual_norm(l, &rho);
            if res <= bound {
                return finish(l, rho);
            }
        }
    }

    // dense SVD fallback on the scaled, unmodified generator
    let mut dense = l.to_dense();
    if scale.is_some() {
        for r in 0..n2 {
            for c in 0..n2 {
                let f = d_of(r) / d_of(c);
                dense[(r, c)] *= C64::new(f, 0.0);
            }
        }
    }
    let (vec, _smin, ssecond) =
        linalg::smallest_singular_vector(dense.view()).map_err(SolverError::Backend)?;
    if ssecond < 1e-10 * norm_l.max(1.0) {
        return Err(SolverError::DegenerateSteadyState(ssecond));
    }
    let x: Vec<C64> = vec.iter().enumerate().map(|(v, &val)| val / d_of(v)).collect();
    let rho = hermitize_and_normalize(n, &x)?;
    let res = residual_norm(l, &rho);
    if res > bound {
        return Err(SolverError::ResidualTooLarge { residual: res, bound });
    }
    finish(l, rho)
}

fn finish(l: &SuperOp, rho: Array2<C64>) -> Result<DensityMatrix, SolverError> {
    let dm = DensityMatrix { layout: l.layout().clone(), data: rho };
    // positivity gate: eigenvalues may dip below zero only within the floor
    let (vals, _) = linalg::herm_eig(dm.data.view()).map_err(SolverError::Backend)?;
    if let Some(&worst) = vals.first() {
        if worst <= -NEGATIVITY_FLOOR {
            return Err(SolverError::NonPositive(worst));
        }
    }
    Ok(dm)
}
