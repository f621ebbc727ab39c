//! Closed-form solutions of the Jaynes-Cummings truncations.
//!
//! These expressions are transcribed verbatim, with no algebraic
//! simplification: their whole value is as an independent cross-check of
//! the numeric steady states, so transcription fidelity beats elegance.
//! All rates and frequencies are angular (rad/ps).

use crate::model::{DressedFrame, SystemParams};
use crate::units::TWO_PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("multi-photon order must be 2 or 3, got {0}")]
    BadOrder(u32),
}

/// Cooperativities and derived rates of the dressed Jaynes-Cummings model.
#[derive(Debug, Clone, Copy)]
pub struct DerivedRates {
    /// C = 4χ²/(κγ).
    pub cooperativity: f64,
    /// C̃ = 4C/(h² + h⁻²).
    pub effective_cooperativity: f64,
    /// κ̃ = γ₊ + γ₋ + 4γ_z + κ.
    pub effective_loss: f64,
    /// Correlation timescale in ps; see [`correlation_timescale`].
    pub correlation_time: f64,
}

pub fn derived_rates(p: &SystemParams, frame: &DressedFrame) -> DerivedRates {
    DerivedRates {
        cooperativity: cooperativity(p),
        effective_cooperativity: effective_cooperativity(p, frame),
        effective_loss: effective_loss(p, frame),
        correlation_time: correlation_timescale(p, frame),
    }
}

pub fn cooperativity(p: &SystemParams) -> f64 {
    4.0 * p.coupling * p.coupling / (p.cavity_loss * p.emitter_decay)
}

/// C̃ = 4C/(h² + h⁻²); 0 in the undriven limit h = 0.
pub fn effective_cooperativity(p: &SystemParams, frame: &DressedFrame) -> f64 {
    let h = frame.dressing_ratio;
    if h == 0.0 {
        return 0.0;
    }
    4.0 * cooperativity(p) / (h * h + 1.0 / (h * h))
}

pub fn effective_loss(p: &SystemParams, frame: &DressedFrame) -> f64 {
    frame.pump_rate + frame.decay_rate + 4.0 * frame.dephasing_rate + p.cavity_loss
}

/// Output flux κ⟨a†a⟩ of the one-excitation dressed Jaynes-Cummings model,
/// a Lorentzian in ω_c − Ω_R:
///
///   ⟨a†a⟩ = 16c²s²χ²γ₊κ̃ /
///           {16c²s²χ²(γ₊+γ₋+κ)κ̃ + κ(γ₊+γ₋)[4(ω_c−Ω_R)² + κ̃²]}.
pub fn flux_lorentzian(p: &SystemParams, frame: &DressedFrame) -> f64 {
    let (s, c) = (frame.sin_theta, frame.cos_theta);
    let g2 = 16.0 * c * c * s * s * p.coupling * p.coupling;
    let (gp, gm) = (frame.pump_rate, frame.decay_rate);
    let kt = effective_loss(p, frame);
    let detuning = p.cavity_freq - frame.rabi;
    let num = g2 * gp * kt;
    let den = g2 * (gp + gm + p.cavity_loss) * kt
        + p.cavity_loss * (gp + gm) * (4.0 * detuning * detuning + kt * kt);
    p.cavity_loss * num / den
}

/// Steady population of the upper dressed state at resonance Ω_R = ω_c:
///
///   ⟨ζ₊ζ₋⟩ = γ₊[16c²s²χ² + κ(γ₊+γ₋+4γ_z+κ)] /
///            {16c²s²χ²(γ₊+γ₋+κ) + κ(γ₊+γ₋)(γ₊+γ₋+4γ_z+κ)}.
pub fn dressed_population(p: &SystemParams, frame: &DressedFrame) -> f64 {
    let (s, c) = (frame.sin_theta, frame.cos_theta);
    let g2 = 16.0 * c * c * s * s * p.coupling * p.coupling;
    let (gp, gm) = (frame.pump_rate, frame.decay_rate);
    let kt = effective_loss(p, frame);
    let num = gp * (g2 + p.cavity_loss * kt);
    let den = g2 * (gp + gm + p.cavity_loss) + p.cavity_loss * (gp + gm) * kt;
    num / den
}

/// γ ≪ κ simplification of the dressed population:
/// [1/(1+h⁴)]·[1/(1+C̃)].
pub fn dressed_population_simplified(p: &SystemParams, frame: &DressedFrame) -> f64 {
    let h = frame.dressing_ratio;
    let ct = effective_cooperativity(p, frame);
    1.0 / (1.0 + h.powi(4)) / (1.0 + ct)
}

/// Flux optimum over the cavity loss: κ_opt = 4csχ and
///
///   max_κ[κ⟨a†a⟩] = 16c²s²χ²γ₊ / [(4csχ+γ₊+γ₋)² + 4(γ₊+γ₋)γ_z].
pub fn max_flux_over_kappa(p: &SystemParams, frame: &DressedFrame) -> (f64, f64) {
    let (s, c) = (frame.sin_theta, frame.cos_theta);
    let (gp, gm, gz) = (frame.pump_rate, frame.decay_rate, frame.dephasing_rate);
    let kappa_opt = 4.0 * c * s * p.coupling;
    let g2 = 16.0 * c * c * s * s * p.coupling * p.coupling;
    let flux_max = g2 * gp / ((kappa_opt + gp + gm).powi(2) + 4.0 * (gp + gm) * gz);
    (kappa_opt, flux_max)
}

/// Zero-delay second-order coherence of the two-excitation truncation at
/// resonance, with γ₋, γ_z ≈ 0:
///
///   g²(0) = 2(γ₊+2κ)[γ₊κ²(γ₊+κ)²(γ₊+2κ)(γ₊+3κ)
///           + 256c⁴s⁴χ⁴(γ₊³+4γ₊²κ+12γ₊κ²+6κ³)
///           + 16c²s²χ²κ(γ₊⁴+5γ₊³κ+17γ₊²κ²+23γ₊κ³+6κ⁴)]
///         / [κ(γ₊+κ)(γ₊+2κ)(γ₊+3κ) + 32c²s²χ²(γ₊²+3γ₊κ+3κ²)]².
pub fn g2_truncated(p: &SystemParams, frame: &DressedFrame) -> f64 {
    let (s, c) = (frame.sin_theta, frame.cos_theta);
    let gp = frame.pump_rate;
    let k = p.cavity_loss;
    let cs2 = c * c * s * s;
    let chi2 = p.coupling * p.coupling;
    let num = 2.0
        * (gp + 2.0 * k)
        * (gp * k.powi(2) * (gp + k).powi(2) * (gp + 2.0 * k) * (gp + 3.0 * k)
            + 256.0
                * cs2.powi(2)
                * chi2.powi(2)
                * (gp.powi(3) + 4.0 * gp.powi(2) * k + 12.0 * gp * k.powi(2) + 6.0 * k.powi(3))
            + 16.0
                * cs2
                * chi2
                * k
                * (gp.powi(4)
                    + 5.0 * gp.powi(3) * k
                    + 17.0 * gp.powi(2) * k.powi(2)
                    + 23.0 * gp * k.powi(3)
                    + 6.0 * k.powi(4)));
    let den = (k * (gp + k) * (gp + 2.0 * k) * (gp + 3.0 * k)
        + 32.0 * cs2 * chi2 * (gp.powi(2) + 3.0 * gp * k + 3.0 * k.powi(2)))
    .powi(2);
    num / den
}

/// Effective multi-photon coupling of the n-th order resonance:
/// λ₂ = (χ²/ω_c)·cs(s²−c²), λ₃ = (χ³/ω_c²)·[c³s³ − 2cs(s²−c²)²].
pub fn lambda_n(p: &SystemParams, frame: &DressedFrame, n: u32) -> Result<f64, AnalyticError> {
    let (s, c) = (frame.sin_theta, frame.cos_theta);
    let chi = p.coupling;
    let wc = p.cavity_freq;
    match n {
        2 => Ok(chi * chi / wc * (c * s * (s * s - c * c))),
        3 => Ok(chi.powi(3) / (wc * wc)
            * (c.powi(3) * s.powi(3) - 2.0 * c * s * (s * s - c * c).powi(2))),
        _ => Err(AnalyticError::BadOrder(n)),
    }
}

/// Correlation timescale of g²(τ) = 1 − exp[−(γ₊+γ₋)(1+C̃)t], reported in
/// ps with the decay rate read as an ordinary frequency.
///
/// The figure-level statement "of the order of 100 ps" only reproduces
/// with the rate divided by 2π; the angular reciprocal at the reference
/// point would be ≈16 ps. The exponential-fit cross-check against the
/// numeric g²(τ) is done on angular rates and is unaffected by this
/// reporting convention.
pub fn correlation_timescale(p: &SystemParams, frame: &DressedFrame) -> f64 {
    let rate = (frame.pump_rate + frame.decay_rate)
        * (1.0 + effective_cooperativity(p, frame));
    TWO_PI / rate
}
