//! Multi-peak Lorentzian fitting by Levenberg-Marquardt.

use super::CavityMode;
use crate::qops::linalg::solve_dense_real;
use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {want} samples for {n_modes} modes, got {got}")]
    TooFewSamples { want: usize, got: usize, n_modes: usize },
    #[error("found only {found} candidate peaks for {want} modes")]
    TooFewPeaks { found: usize, want: usize },
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),
    #[error("fitted width for mode at {frequency:.4e} is not positive: {width:.4e}")]
    NegativeWidth { frequency: f64, width: f64 },
    #[error("linear solve inside the trust-region step failed: {0}")]
    Step(String),
}

/// One fitted Lorentzian; same unit as the sample frequencies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FittedMode {
    pub frequency: f64,
    pub linewidth: f64,
    pub coupling: f64,
}

impl FittedMode {
    /// Promote to a [`CavityMode`]; the radiative split is not identifiable
    /// from J(ω) alone and is left to the caller.
    pub fn into_cavity_mode(self, radiative_linewidth: f64) -> CavityMode {
        CavityMode {
            frequency: self.frequency,
            linewidth: self.linewidth,
            radiative_linewidth,
            coupling: self.coupling,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// Modes sorted by frequency ascending.
    pub modes: Vec<FittedMode>,
    pub residual_rms: f64,
    pub iterations: usize,
}

fn model(params: &[f64], omega: f64) -> f64 {
    params
        .chunks_exact(3)
        .map(|m| {
            let (w0, k, chi) = (m[0], m[1], m[2]);
            let half = k / 2.0;
            chi * chi / std::f64::consts::PI * half / ((omega - w0).powi(2) + half * half)
        })
        .sum()
}

fn jacobian_row(params: &[f64], omega: f64, row: &mut [f64]) {
    for (mode, out) in params.chunks_exact(3).zip(row.chunks_exact_mut(3)) {
        let (w0, k, chi) = (mode[0], mode[1], mode[2]);
        let half = k / 2.0;
        let d = (omega - w0).powi(2) + half * half;
        let pref = chi * chi / std::f64::consts::PI;
        out[0] = pref * half * 2.0 * (omega - w0) / (d * d);
        out[1] = pref * (0.5 / d - half * half / (d * d));
        out[2] = 2.0 * chi / std::f64::consts::PI * half / d;
    }
}

/// Initial guesses from the n largest strict local maxima: position, a
/// half-maximum width walk, and the peak identity χ² = J_peak·π·κ/2.
fn initial_guess(samples: &[(f64, f64)], n_modes: usize) -> Result<Vec<f64>, FitError> {
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for i in 1..samples.len() - 1 {
        if samples[i].1 > samples[i - 1].1 && samples[i].1 >= samples[i + 1].1 {
            peaks.push((i, samples[i].1));
        }
    }
    peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    if peaks.len() < n_modes {
        return Err(FitError::TooFewPeaks { found: peaks.len(), want: n_modes });
    }
    let mut params = Vec::with_capacity(3 * n_modes);
    for &(idx, height) in peaks.iter().take(n_modes) {
        let w0 = samples[idx].0;
        let half_height = height / 2.0;
        let mut left = samples[0].0;
        for j in (0..idx).rev() {
            if samples[j].1 < half_height {
                left = samples[j].0;
                break;
            }
        }
        let mut right = samples[samples.len() - 1].0;
        for item in samples.iter().skip(idx + 1) {
            if item.1 < half_height {
                right = item.0;
                break;
            }
        }
        let fwhm = (right - left).max(2.0 * (samples[1].0 - samples[0].0).abs());
        let chi2 = height * std::f64::consts::PI * fwhm / 2.0;
        params.extend_from_slice(&[w0, fwhm, chi2.max(f64::MIN_POSITIVE).sqrt()]);
    }
    Ok(params)
}

const MAX_ITERATIONS: usize = 300;

/// Nonlinear least squares of a sum of `n_modes` Lorentzians to (ω, J)
/// samples, Levenberg-Marquardt style with a multiplicative damping
/// schedule. Initial guesses come from the largest local maxima.
pub fn fit_lorentzians(samples: &[(f64, f64)], n_modes: usize) -> Result<FitResult, FitError> {
    let want = 4 * n_modes;
    if samples.len() < want {
        return Err(FitError::TooFewSamples { want, got: samples.len(), n_modes });
    }
    let params = initial_guess(samples, n_modes)?;
    let guess: Vec<FittedMode> = params
        .chunks_exact(3)
        .map(|m| FittedMode { frequency: m[0], linewidth: m[1], coupling: m[2] })
        .collect();
    fit_lorentzians_with_guess(samples, &guess)
}

/// Same fit from an explicit starting point.
pub fn fit_lorentzians_with_guess(
    samples: &[(f64, f64)],
    guess: &[FittedMode],
) -> Result<FitResult, FitError> {
    let n_modes = guess.len();
    let want = 4 * n_modes;
    if samples.len() < want {
        return Err(FitError::TooFewSamples { want, got: samples.len(), n_modes });
    }
    let mut params: Vec<f64> = guess
        .iter()
        .flat_map(|m| [m.frequency, m.linewidth, m.coupling])
        .collect();
    let np = params.len();
    let cost_of = |p: &[f64]| -> f64 {
        samples.iter().map(|&(w, j)| (model(p, w) - j).powi(2)).sum::<f64>()
    };
    let mut cost = cost_of(&params);
    let mut lambda = 1e-3;
    let mut row = vec![0.0; np];
    let mut converged_at = None;

    for iter in 0..MAX_ITERATIONS {
        // accumulate JᵀJ and Jᵀr
        let mut jtj = Array2::<f64>::zeros((np, np));
        let mut jtr = vec![0.0; np];
        for &(w, j) in samples {
            jacobian_row(&params, w, &mut row);
            let r = model(&params, w) - j;
            for a in 0..np {
                jtr[a] += row[a] * r;
                for b in a..np {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        for a in 0..np {
            for b in 0..a {
                jtj[(a, b)] = jtj[(b, a)];
            }
        }
        let grad_norm = jtr.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if grad_norm < 1e-14 * (1.0 + cost) {
            converged_at = Some(iter);
            break;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let mut damped = jtj.clone();
            for a in 0..np {
                damped[(a, a)] += lambda * jtj[(a, a)].max(1e-300);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let step = match solve_dense_real(&damped, &rhs) {
                Ok(s) => s,
                Err(e) => return Err(FitError::Step(e)),
            };
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, s)| p + s).collect();
            let trial_cost = cost_of(&trial);
            if trial_cost.is_finite() && trial_cost < cost {
                let rel_drop = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                params = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if rel_drop < 1e-12 {
                    converged_at = Some(iter);
                }
                break;
            }
            lambda *= 2.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !accepted {
            converged_at = Some(iter);
        }
        if converged_at.is_some() {
            break;
        }
    }
    let iterations = converged_at.ok_or(FitError::NonConvergence(MAX_ITERATIONS))?;

    let mut modes: Vec<FittedMode> = params
        .chunks_exact(3)
        .map(|m| FittedMode { frequency: m[0], linewidth: m[1], coupling: m[2].abs() })
        .collect();
    for m in &modes {
        if m.linewidth <= 0.0 {
            return Err(FitError::NegativeWidth { frequency: m.frequency, width: m.linewidth });
        }
    }
    modes.sort_by(|a, b| a.frequency.partial_cmp(&b.frequency).unwrap());
    let residual_rms = (cost / samples.len() as f64).sqrt();
    Ok(FitResult { modes, residual_rms, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{spectral_density, table_s1};
    use approx::assert_abs_diff_eq;

    fn synthesize(lo_thz: f64, hi_thz: f64, n: usize) -> Vec<(f64, f64)> {
        let modes = table_s1().unwrap();
        (0..n)
            .map(|k| {
                let nu = lo_thz + (hi_thz - lo_thz) * k as f64 / (n - 1) as f64;
                let w = crate::units::TWO_PI * nu * 1e12;
                (w, spectral_density(&modes, w))
            })
            .collect()
    }

    #[test]
    fn single_lorentzian_recovers_exactly() {
        let modes = &table_s1().unwrap()[..1];
        let samples: Vec<(f64, f64)> = (0..400)
            .map(|k| {
                let nu = 25.5 + 2.5 * k as f64 / 399.0;
                let w = crate::units::TWO_PI * nu * 1e12;
                (w, spectral_density(modes, w))
            })
            .collect();
        let fit = fit_lorentzians(&samples, 1).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b;
        assert!(rel(fit.modes[0].frequency, modes[0].frequency) < 1e-6);
        assert!(rel(fit.modes[0].linewidth, modes[0].linewidth) < 1e-6);
        assert!(rel(fit.modes[0].coupling, modes[0].coupling) < 1e-6);
    }

    #[test]
    fn two_mode_round_trip_within_one_percent() {
        let samples = synthesize(25.0, 29.5, 900);
        let fit = fit_lorentzians(&samples, 2).unwrap();
        let modes = table_s1().unwrap();
        for (got, want) in fit.modes.iter().zip(&modes) {
            assert!((got.frequency - want.frequency).abs() / want.frequency < 0.01);
            assert!((got.linewidth - want.linewidth).abs() / want.linewidth < 0.01);
            assert!((got.coupling - want.coupling).abs() / want.coupling < 0.01);
        }
        assert!(fit.residual_rms < 1e-3 * samples.iter().map(|s| s.1).fold(0.0, f64::max));
    }

    #[test]
    fn guess_order_does_not_matter() {
        let samples = synthesize(25.0, 29.5, 900);
        let modes = table_s1().unwrap();
        let fwd: Vec<FittedMode> = modes
            .iter()
            .map(|m| FittedMode {
                frequency: m.frequency * 1.001,
                linewidth: m.linewidth * 1.3,
                coupling: m.coupling * 0.8,
            })
            .collect();
        let rev: Vec<FittedMode> = fwd.iter().rev().copied().collect();
        let a = fit_lorentzians_with_guess(&samples, &fwd).unwrap();
        let b = fit_lorentzians_with_guess(&samples, &rev).unwrap();
        for (x, y) in a.modes.iter().zip(&b.modes) {
            assert_abs_diff_eq!(x.frequency, y.frequency, epsilon = 1e-4 * x.frequency);
            assert_abs_diff_eq!(x.linewidth, y.linewidth, epsilon = 1e-3 * x.linewidth);
            assert_abs_diff_eq!(x.coupling, y.coupling, epsilon = 1e-3 * x.coupling);
        }
    }

    #[test]
    fn too_few_samples_rejected() {
        let samples = synthesize(25.0, 29.5, 7);
        assert!(matches!(
            fit_lorentzians(&samples, 2),
            Err(FitError::TooFewSamples { .. })
        ));
    }
}
