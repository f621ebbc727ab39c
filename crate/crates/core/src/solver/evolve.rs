//! Adaptive Dormand-Prince 5(4) propagation of vectorized states.

use super::SolverError;
use crate::qops::{unvectorize, vectorize, SuperOp};
use ndarray::Array2;
use num_complex::Complex64 as C64;

// Dormand-Prince coefficients (FSAL).
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Relative local error per step.
    pub rtol: f64,
    pub atol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-14 }
    }
}

struct Stepper<'a> {
    l: &'a SuperOp,
    opts: EvolveOptions,
    k: Vec<Vec<C64>>,
    scratch: Vec<C64>,
}

impl<'a> Stepper<'a> {
    fn new(l: &'a SuperOp, opts: EvolveOptions) -> Self {
        let n2 = l.dim();
        Self { l, opts, k: vec![vec![C64::new(0.0, 0.0); n2]; 7], scratch: vec![C64::new(0.0, 0.0); n2] }
    }

    /// One attempted step from (t, y) with size h; k[0] must hold L·y.
    /// Returns (error norm, 5th-order candidate).
    fn attempt(&mut self, y: &[C64], h: f64) -> (f64, Vec<C64>) {
        let n2 = y.len();
        for stage in 1..=5 {
            for i in 0..n2 {
                let mut acc = C64::new(0.0, 0.0);
                for (j, a) in A[stage - 1].iter().enumerate().take(stage) {
                    acc += C64::new(*a, 0.0) * self.k[j][i];
                }
                self.scratch[i] = y[i] + C64::new(h, 0.0) * acc;
            }
            let (head, tail) = self.k.split_at_mut(stage);
            let _ = head;
            self.l.apply_into(&self.scratch, &mut tail[0]);
        }
        // 5th-order solution; its derivative is stage 7 (FSAL)
        let mut y5 = vec![C64::new(0.0, 0.0); n2];
        for i in 0..n2 {
            let mut acc = C64::new(0.0, 0.0);
            for (j, a) in A[5].iter().enumerate() {
                acc += C64::new(*a, 0.0) * self.k[j][i];
            }
            y5[i] = y[i] + C64::new(h, 0.0) * acc;
        }
        self.l.apply_into(&y5, {
            let (head, tail) = self.k.split_at_mut(6);
            let _ = head;
            &mut tail[0]
        });
        let mut err_acc = 0.0f64;
        for i in 0..n2 {
            let mut e = C64::new(0.0, 0.0);
            for j in 0..7 {
                e += C64::new(B5[j] - B4[j], 0.0) * self.k[j][i];
            }
            let e = (e * C64::new(h, 0.0)).norm();
            let tol = self.opts.atol + self.opts.rtol * y[i].norm().max(y5[i].norm());
            err_acc += (e / tol).powi(2);
        }
        let err = (err_acc / n2 as f64).sqrt();
        (err, y5)
    }
}

/// Integrate dx/dt = Lx from x(0) = y0, invoking `record` at every accepted
/// step, and stopping at `t_end`. Steps are clamped to land exactly on
/// `t_end` and on any requested `checkpoints` (ascending).
pub fn evolve_recording(
    l: &SuperOp,
    y0: &[C64],
    t_end: f64,
    checkpoints: &[f64],
    opts: EvolveOptions,
    mut record: impl FnMut(f64, &[C64]),
) -> Result<(), SolverError> {
    let n2 = l.dim();
    assert_eq!(y0.len(), n2);
    if t_end == 0.0 {
        record(0.0, y0);
        return Ok(());
    }
    let mut y = y0.to_vec();
    let mut t = 0.0f64;
    let mut stepper = Stepper::new(l, opts);
    stepper.l.apply_into(&y, &mut stepper.k[0]);
    record(0.0, &y);

    // initial step from the local derivative scale
    let ynorm: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let dnorm: f64 = stepper.k[0].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut h = if dnorm > 0.0 { (0.01 * (ynorm + opts.atol) / dnorm).min(t_end) } else { t_end };
    let mut next_cp = checkpoints.iter().copied().find(|&c| c > 0.0);
    let mut cp_iter = checkpoints.iter().copied().filter(|&c| c > 0.0);
    // advance the lazy iterator past the first pending checkpoint
    let _ = cp_iter.next();

    let h_floor = t_end * 1e-14;
    loop {
        if t >= t_end {
            break;
        }
        let mut h_try = h.min(t_end - t);
        if let Some(cp) = next_cp {
            if cp > t {
                h_try = h_try.min(cp - t);
            }
        }
        let (err, y5) = stepper.attempt(&y, h_try);
        if err <= 1.0 || h_try <= h_floor {
            if h_try <= h_floor && err > 1.0 {
                return Err(SolverError::StepUnderflow(t));
            }
            t += h_try;
            y = y5;
            stepper.k.swap(0, 6); // FSAL
            record(t, &y);
            if let Some(cp) = next_cp {
                if t >= cp - h_floor {
                    next_cp = cp_iter.next();
                }
            }
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h = (h_try * factor.clamp(0.2, 5.0)).max(h_floor);
    }
    Ok(())
}

/// e^{Lτ} ρ₀ at each requested τ (ascending from 0).
pub fn evolve(
    l: &SuperOp,
    rho0: &Array2<C64>,
    taus: &[f64],
    opts: EvolveOptions,
) -> Result<Vec<Array2<C64>>, SolverError> {
    if taus.is_empty() || taus[0] != 0.0 || taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolverError::BadTauGrid);
    }
    let n = l.basis_dim();
    let y0 = vectorize(rho0.view());
    let t_end = *taus.last().unwrap();
    let mut out: Vec<Array2<C64>> = Vec::with_capacity(taus.len());
    let mut want = taus.iter().copied().peekable();
    let tol = t_end * 1e-12;
    evolve_recording(l, &y0, t_end, taus, opts, |t, y| {
        while let Some(&tau) = want.peek() {
            if (t - tau).abs() <= tol.max(f64::MIN_POSITIVE) || t > tau {
                out.push(unvectorize(n, y));
                want.next();
            } else {
                break;
            }
        }
    })?;
    while out.len() < taus.len() {
        // t_end reached within clamp tolerance
        let last = out.last().cloned().unwrap_or_else(|| unvectorize(n, &y0));
        out.push(last);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qops::{annihilation, embed, lindblad_super, Operator, SpaceLayout};
    use approx::assert_abs_diff_eq;

    fn decaying_cavity(kappa: f64, dim: usize) -> SuperOp {
        let l = SpaceLayout::new(vec![("cavity", dim)]).unwrap();
        let a = embed(annihilation(dim).view(), "cavity", &l).unwrap();
        let h = Operator::zeros(l);
        lindblad_super(&h, &[(kappa, a)]).unwrap()
    }

    #[test]
    fn zero_generator_keeps_state_constant() {
        let l = SpaceLayout::new(vec![("cavity", 3)]).unwrap();
        let h = Operator::zeros(l);
        let sup = lindblad_super(&h, &[]).unwrap();
        let mut rho = Array2::<C64>::zeros((3, 3));
        rho[(2, 2)] = C64::new(0.5, 0.0);
        rho[(0, 0)] = C64::new(0.5, 0.0);
        let states = evolve(&sup, &rho, &[0.0, 1.0, 5.0], EvolveOptions::default()).unwrap();
        for s in states {
            assert!((&s - &rho).iter().all(|v| v.norm() < 1e-12));
        }
    }

    #[test]
    fn photon_number_decays_exponentially() {
        let kappa = 0.7;
        let sup = decaying_cavity(kappa, 4);
        let mut rho = Array2::<C64>::zeros((4, 4));
        rho[(2, 2)] = C64::new(1.0, 0.0); // ⟨n⟩(0) = 2
        let taus = [0.0, 0.5, 1.0, 2.0, 4.0];
        let states = evolve(&sup, &rho, &taus, EvolveOptions::default()).unwrap();
        for (tau, s) in taus.iter().zip(&states) {
            let n: f64 = (0..4).map(|k| k as f64 * s[(k, k)].re).sum();
            assert_abs_diff_eq!(n, 2.0 * (-kappa * tau).exp(), epsilon = 1e-8);
        }
    }

    #[test]
    fn trace_is_conserved_along_trajectory() {
        let sup = decaying_cavity(0.9, 5);
        let mut rho = Array2::<C64>::zeros((5, 5));
        rho[(3, 3)] = C64::new(0.7, 0.0);
        rho[(1, 1)] = C64::new(0.3, 0.0);
        rho[(1, 3)] = C64::new(0.1, 0.05);
        rho[(3, 1)] = C64::new(0.1, -0.05);
        let taus = [0.0, 0.3, 1.1, 2.7, 6.0];
        let states = evolve(&sup, &rho, &taus, EvolveOptions::default()).unwrap();
        for s in states {
            let tr: C64 = (0..5).map(|i| s[(i, i)]).sum();
            assert_abs_diff_eq!(tr.re, 1.0, epsilon = 1e-9);
            assert!(tr.im.abs() < 1e-12);
        }
    }

    #[test]
    fn bad_tau_grids_are_rejected() {
        let sup = decaying_cavity(0.7, 2);
        let rho = Array2::<C64>::from_diag_elem(2, C64::new(0.5, 0.0));
        assert!(matches!(
            evolve(&sup, &rho, &[0.5, 1.0], EvolveOptions::default()),
            Err(SolverError::BadTauGrid)
        ));
        assert!(matches!(
            evolve(&sup, &rho, &[0.0, 1.0, 1.0], EvolveOptions::default()),
            Err(SolverError::BadTauGrid)
        ));
    }
}
