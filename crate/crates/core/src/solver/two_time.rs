//! Two-time correlation functions via the quantum regression theorem.

use super::evolve::{evolve_recording, EvolveOptions};
use super::{DensityMatrix, SolverError};
use crate::qops::{vectorize, Operator, SuperOp};
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Which regression kernel to propagate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKernel {
    /// ⟨X⁻(0) X⁺(τ)⟩ = Tr[X⁺ e^{Lτ}(ρ X⁻)] — the spectrum kernel.
    Amplitude,
    /// ⟨X⁻(0) X⁻X⁺(τ) X⁺(0)⟩ = Tr[X⁻X⁺ e^{Lτ}(X⁺ ρ X⁻)] — the
    /// intensity-correlation kernel behind g⁽²⁾(τ).
    Intensity,
}

/// Correlation values on the integrator's own accepted-step grid.
#[derive(Debug, Clone)]
pub struct CorrelationTrace {
    pub taus: Vec<f64>,
    pub values: Vec<C64>,
}

impl CorrelationTrace {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// ∫₀^∞ e^{(iω−Γ/2)τ} C(τ) dτ by trapezoid on the adaptive grid.
    pub fn laplace_fourier(&self, omega: f64, half_width: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for w in self.taus.windows(2).zip(self.values.windows(2)) {
            let (ts, vs) = w;
            let f = |t: f64, v: C64| (C64::new(-half_width, omega) * t).exp() * v;
            let a = f(ts[0], vs[0]);
            let b = f(ts[1], vs[1]);
            acc += (a + b) * ((ts[1] - ts[0]) / 2.0);
        }
        acc
    }
}

fn validate(trace: &CorrelationTrace) -> Result<(), SolverError> {
    if trace.taus.is_empty() || trace.taus[0] != 0.0 {
        return Err(SolverError::BadTauGrid);
    }
    if trace.values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(SolverError::Backend("non-finite correlation value".into()));
    }
    Ok(())
}

/// Propagate the chosen kernel from the steady state out to `tau_max`,
/// sampling on the integrator's accepted steps.
pub fn two_time(
    l: &SuperOp,
    rho_ss: &DensityMatrix,
    out_op: &Operator,
    kernel: CorrelationKernel,
    tau_max: f64,
    opts: EvolveOptions,
) -> Result<CorrelationTrace, SolverError> {
    let x_minus = out_op.dag();
    let initial: Array2<C64> = match kernel {
        CorrelationKernel::Amplitude => rho_ss.data().dot(x_minus.data()),
        CorrelationKernel::Intensity => out_op.data().dot(rho_ss.data()).dot(x_minus.data()),
    };
    let weight: Operator = match kernel {
        CorrelationKernel::Amplitude => out_op.clone(),
        CorrelationKernel::Intensity => &x_minus * out_op,
    };
    let y0 = vectorize(initial.view());
    let n = l.basis_dim();
    let mut taus = Vec::new();
    let mut values = Vec::new();
    evolve_recording(l, &y0, tau_max, &[], opts, |t, y| {
        // Tr[W · M] with vec(M) in column stacking
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += weight.data()[(i, j)] * y[i * n + j];
            }
        }
        taus.push(t);
        values.push(acc);
    })?;
    let trace = CorrelationTrace { taus, values };
    validate(&trace)?;
    Ok(trace)
}

/// |Re λ₂| of the generator: the slowest nonzero decay rate.
///
/// Small systems get the exact dense spectrum; larger ones a power
/// iteration on the deflated propagator, whose dominant eigenvalue is the
/// slowest surviving mode once the stationary direction is projected out.
pub fn slowest_decay_rate(l: &SuperOp, rho_ss: &DensityMatrix) -> Result<f64, SolverError> {
    let n2 = l.dim();
    if n2 <= 1024 {
        let eigs = l.eigenvalues()?;
        let scale = eigs.iter().map(|e| e.norm()).fold(0.0f64, f64::max).max(1e-300);
        let slow = eigs
            .iter()
            .filter(|e| e.re < -1e-12 * scale)
            .map(|e| -e.re)
            .fold(f64::INFINITY, f64::min);
        if slow.is_finite() {
            return Ok(slow);
        }
        return Err(SolverError::Backend("no decaying mode found".into()));
    }

    // power iteration on e^{LT} with the steady direction deflated
    let n = l.basis_dim();
    let rho_vec = vectorize(rho_ss.data().view());
    let trace_of = |y: &[C64]| -> C64 { (0..n).map(|i| y[i * n + i]).sum() };
    let deflate = |y: &mut Vec<C64>| {
        let tr = trace_of(y);
        for (i, v) in y.iter_mut().enumerate() {
            *v -= tr * rho_vec[i];
        }
    };
    // deterministic pseudo-random start
    let mut y: Vec<C64> = (0..n2)
        .map(|i| {
            let a = ((i as f64 + 1.0) * 0.754877666).fract() - 0.5;
            let b = ((i as f64 + 1.0) * 0.569840296).fract() - 0.5;
            C64::new(a, b)
        })
        .collect();
    deflate(&mut y);
    let fast_scale = l
        .diagonal_real()
        .iter()
        .map(|r| r.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut t_window = 2.0 / fast_scale;
    let mut estimate = f64::NAN;
    let mut stable = 0;
    for _ in 0..80 {
        let norm0: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm0 == 0.0 {
            return Err(SolverError::Backend("deflated state vanished".into()));
        }
        for v in y.iter_mut() {
            *v /= norm0;
        }
        let mut y_next = y.clone();
        let opts = EvolveOptions { rtol: 1e-8, atol: 1e-12 };
        let mut last: Vec<C64> = y.clone();
        evolve_recording(l, &y, t_window, &[], opts, |_, s| {
            last.copy_from_slice(s);
        })?;
        y_next.copy_from_slice(&last);
        deflate(&mut y_next);
        let norm1: f64 = y_next.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm1 == 0.0 {
            return Err(SolverError::Backend("deflated state vanished".into()));
        }
        let rate = -(norm1.ln()) / t_window;
        y = y_next;
        if estimate.is_finite() && (rate - estimate).abs() <= 0.02 * rate.abs() {
            stable += 1;
            if stable >= 2 {
                return Ok(rate.abs());
            }
        } else {
            stable = 0;
        }
        estimate = rate;
        // lengthen the window as the surviving mode slows down
        if rate.abs() > 0.0 {
            t_window = (t_window * 2.0).min(2.0 / rate.abs());
        } else {
            t_window *= 2.0;
        }
    }
    Ok(estimate.abs())
}
