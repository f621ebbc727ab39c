//! Physical parameters and the dressed-frame transformation.
//!
//! The driven emitter is described in the basis of its two dressed states,
//! split by the Rabi frequency Ω_R = √(Δ² + Ω²). The basis on the emitter
//! factor is ordered (|−⟩, |+⟩), so the inversion operator is diag(−1, +1),
//! the raising operator ζ₊ = |+⟩⟨−| maps index 0 → 1, and the bare lowering
//! operator becomes σ₋ = cs ζ_z + s² ζ₋ − c² ζ₊.

use crate::units::thz_to_angular;
use thiserror::Error;

mod hamiltonian;
mod liouvillian;

pub use hamiltonian::{build_hamiltonian, build_x_plus, quadrature};
pub use liouvillian::{build_liouvillian, collapse_terms, LiouvillianParts};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dressing undefined: zero drive amplitude with non-positive detuning")]
    DressingUndefined,
    #[error("negative parameter: {name} = {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("n_max must be at least 1")]
    NMaxTooSmall,
    #[error("radiative fraction must lie in [0, 1], got {0}")]
    BadRadiativeFraction(f64),
    #[error("rabi frequency {rabi} smaller than {name} = {value}")]
    InconsistentDrive { name: &'static str, rabi: f64, value: f64 },
    #[error("thermal occupation undefined for negative temperature {0} K")]
    NegativeTemperature(f64),
    #[error(transparent)]
    Qops(#[from] crate::qops::QopsError),
}

/// Drive specification: any two of (amplitude Ω, detuning Δ, Rabi Ω_R)
/// determine the third via Ω_R² = Δ² + Ω². Values are ordinary frequencies
/// in THz at this level; resolution happens before the 2π conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSpec {
    AmplitudeDetuning { amplitude: f64, detuning: f64 },
    /// Detuning derived as Δ = +√(Ω_R² − Ω²); the drive is blue-detuned.
    AmplitudeRabi { amplitude: f64, rabi: f64 },
    DetuningRabi { detuning: f64, rabi: f64 },
}

impl DriveSpec {
    /// Resolve to (amplitude, detuning) in the same units as the input.
    pub fn resolve(&self) -> Result<(f64, f64), ModelError> {
        match *self {
            DriveSpec::AmplitudeDetuning { amplitude, detuning } => {
                if amplitude < 0.0 {
                    return Err(ModelError::NegativeParameter { name: "drive amplitude", value: amplitude });
                }
                Ok((amplitude, detuning))
            }
            DriveSpec::AmplitudeRabi { amplitude, rabi } => {
                if amplitude < 0.0 {
                    return Err(ModelError::NegativeParameter { name: "drive amplitude", value: amplitude });
                }
                if rabi < amplitude {
                    return Err(ModelError::InconsistentDrive { name: "amplitude", rabi, value: amplitude });
                }
                Ok((amplitude, (rabi * rabi - amplitude * amplitude).sqrt()))
            }
            DriveSpec::DetuningRabi { detuning, rabi } => {
                if rabi < detuning.abs() {
                    return Err(ModelError::InconsistentDrive { name: "detuning", rabi, value: detuning });
                }
                Ok(((rabi * rabi - detuning * detuning).sqrt(), detuning))
            }
        }
    }
}

/// Physical rates and frequencies, stored as angular frequencies in rad/ps.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Emitter-cavity coupling χ.
    pub coupling: f64,
    /// Cavity loss κ.
    pub cavity_loss: f64,
    /// Emitter decay γ.
    pub emitter_decay: f64,
    /// Cavity frequency ω_c.
    pub cavity_freq: f64,
    /// Laser amplitude Ω.
    pub drive_amplitude: f64,
    /// Laser detuning Δ (any sign).
    pub drive_detuning: f64,
    /// Bath temperature in kelvin.
    pub temperature: f64,
    /// Fock truncation: cavity dimension is n_max + 1.
    pub n_max: usize,
    /// Radiative share of the cavity loss, κ_rad/κ.
    pub radiative_fraction: f64,
}

impl SystemParams {
    /// Build from ordinary frequencies in THz, as quoted in figure captions.
    pub fn from_thz(
        chi: f64,
        kappa: f64,
        gamma: f64,
        omega_c: f64,
        drive: DriveSpec,
    ) -> Result<Self, ModelError> {
        for (name, v) in [("chi", chi), ("kappa", kappa), ("gamma", gamma), ("omega_c", omega_c)] {
            if v < 0.0 {
                return Err(ModelError::NegativeParameter { name, value: v });
            }
        }
        let (amplitude, detuning) = drive.resolve()?;
        Ok(Self {
            coupling: thz_to_angular(chi),
            cavity_loss: thz_to_angular(kappa),
            emitter_decay: thz_to_angular(gamma),
            cavity_freq: thz_to_angular(omega_c),
            drive_amplitude: thz_to_angular(amplitude),
            drive_detuning: thz_to_angular(detuning),
            temperature: 0.0,
            n_max: 4,
            radiative_fraction: 1.0,
        })
    }

    pub fn with_temperature(mut self, kelvin: f64) -> Self {
        self.temperature = kelvin;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_radiative_fraction(mut self, f: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&f) {
            return Err(ModelError::BadRadiativeFraction(f));
        }
        self.radiative_fraction = f;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_max < 1 {
            return Err(ModelError::NMaxTooSmall);
        }
        if self.temperature < 0.0 {
            return Err(ModelError::NegativeTemperature(self.temperature));
        }
        Ok(())
    }

    /// Rabi frequency √(Δ² + Ω²) in rad/ps.
    pub fn rabi(&self) -> f64 {
        self.drive_detuning.hypot(self.drive_amplitude)
    }

    /// Dressed-frame quantities for the current drive.
    pub fn dressed(&self) -> Result<DressedFrame, ModelError> {
        dress(self.drive_amplitude, self.drive_detuning, self.emitter_decay)
    }

    /// Tensor layout: emitter (dim 2) ⊗ cavity (dim n_max + 1).
    pub fn layout(&self) -> crate::qops::SpaceLayout {
        crate::qops::SpaceLayout::new(vec![
            ("emitter".to_string(), 2),
            ("cavity".to_string(), self.n_max + 1),
        ])
        .expect("static layout")
    }
}

/// Derived dressing quantities: mixing angle, dressed-state decomposition
/// of the emitter decay into loss, pump and dephasing channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedFrame {
    /// Ω_R in rad/ps.
    pub rabi: f64,
    /// h = (Ω_R − Δ)/Ω; 0 in the undriven limit, 1 on resonance.
    pub dressing_ratio: f64,
    /// θ = arctan h ∈ [0, π/4] for Δ ≥ 0.
    pub mixing_angle: f64,
    pub sin_theta: f64,
    pub cos_theta: f64,
    /// γ₊ = γ c⁴, incoherent pumping of the upper dressed state.
    pub pump_rate: f64,
    /// γ₋ = γ s⁴, incoherent dressed-state decay.
    pub decay_rate: f64,
    /// γ_z = γ c² s², dressed dephasing.
    pub dephasing_rate: f64,
}

/// Dressed-frame transformation of a driven emitter.
///
/// Errors when Ω = 0 with Δ ≤ 0; Ω = 0 with Δ > 0 is the h = 0 limit.
pub fn dress(omega: f64, delta: f64, gamma: f64) -> Result<DressedFrame, ModelError> {
    if omega < 0.0 {
        return Err(ModelError::NegativeParameter { name: "drive amplitude", value: omega });
    }
    if gamma < 0.0 {
        return Err(ModelError::NegativeParameter { name: "gamma", value: gamma });
    }
    let (rabi, h) = if omega == 0.0 {
        if delta <= 0.0 {
            return Err(ModelError::DressingUndefined);
        }
        (delta, 0.0)
    } else {
        let rabi = delta.hypot(omega);
        // For Δ ≥ 0 the difference Ω_R − Δ cancels badly; Ω/(Ω_R + Δ) is the
        // algebraically identical stable form.
        let h = if delta >= 0.0 { omega / (rabi + delta) } else { (rabi - delta) / omega };
        (rabi, h)
    };
    let theta = h.atan();
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    Ok(DressedFrame {
        rabi,
        dressing_ratio: h,
        mixing_angle: theta,
        sin_theta: s,
        cos_theta: c,
        pump_rate: gamma * c2 * c2,
        decay_rate: gamma * s2 * s2,
        dephasing_rate: gamma * c2 * s2,
    })
}

/// Cavity dissipation channel of the master equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityDissipator {
    /// D(a), the standard Lindblad description.
    StandardA,
    /// D(X⁺) built from the positive-frequency transitions of a + a†.
    DressedX,
}

/// Operator entering the output flux and all correlation functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputOperator {
    A,
    XPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianForm {
    /// All dressed couplings, including counter-rotating and displacement terms.
    Full,
    /// Excitation-conserving truncation; valid near Ω_R = ω_c.
    JaynesCummings,
}

/// Emitter dissipation channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitterDissipator {
    /// (γ/2) D(σ₋) with the bare lowering operator.
    BareSigma,
    /// Secular dressed-basis rates: (γ₋/2)D(ζ₋) + (γ₊/2)D(ζ₊) + (γ_z/2)D(ζ_z).
    DressedRates,
}

/// Master-equation variant switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelVariant {
    pub cavity_dissipator: CavityDissipator,
    pub output_operator: OutputOperator,
    pub hamiltonian: HamiltonianForm,
    pub emitter_dissipator: EmitterDissipator,
    /// Attach a thermal bath to the cavity channel.
    pub thermal: bool,
}

impl Default for ModelVariant {
    /// The configuration behind all headline results: full Hamiltonian,
    /// D(X⁺) cavity decay, bare σ₋ emitter decay, X⁺ output, T = 0.
    fn default() -> Self {
        Self {
            cavity_dissipator: CavityDissipator::DressedX,
            output_operator: OutputOperator::XPlus,
            hamiltonian: HamiltonianForm::Full,
            emitter_dissipator: EmitterDissipator::BareSigma,
            thermal: false,
        }
    }
}

impl ModelVariant {
    /// The Jaynes-Cummings truncation discards counter-rotating terms, so a
    /// is the consistent output and jump operator regardless of the flags.
    pub fn effective_output(&self) -> OutputOperator {
        match self.hamiltonian {
            HamiltonianForm::JaynesCummings => OutputOperator::A,
            HamiltonianForm::Full => self.output_operator,
        }
    }

    pub fn effective_cavity_dissipator(&self) -> CavityDissipator {
        match self.hamiltonian {
            HamiltonianForm::JaynesCummings => CavityDissipator::StandardA,
            HamiltonianForm::Full => self.cavity_dissipator,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::TWO_PI;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn resonant_drive_is_fully_dressed() {
        // Ω/2π = 10, Δ = 0 → h = 1, θ = π/4, γ₊ = γ₋ = γ/4
        let gamma = thz_to_angular(0.0005);
        let f = dress(thz_to_angular(10.0), 0.0, gamma).unwrap();
        assert_abs_diff_eq!(f.dressing_ratio, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.mixing_angle, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(f.pump_rate, gamma / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.decay_rate, gamma / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn reference_point_has_h_exactly_one_fifth() {
        // Ω/2π = 10, Δ/2π = 24 → Ω_R/2π = 26, h = 0.2
        let f = dress(thz_to_angular(10.0), thz_to_angular(24.0), 1.0).unwrap();
        assert_abs_diff_eq!(f.rabi / TWO_PI, 26.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.dressing_ratio, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn dressed_rates_at_h_point_two() {
        // s = sin(arctan 0.2), c = cos(arctan 0.2):
        // γ₊ = 0.924556 γ, γ₋ = 0.0014793 γ, γ_z = 0.0369822 γ
        let gamma = 1.0;
        // Ω = 2hΩ_R/(1+h²), Δ = Ω_R(1−h²)/(1+h²) hits h exactly
        let h: f64 = 0.2;
        let rabi = 1.0;
        let omega = 2.0 * h * rabi / (1.0 + h * h);
        let delta = rabi * (1.0 - h * h) / (1.0 + h * h);
        let f = dress(omega, delta, gamma).unwrap();
        assert_abs_diff_eq!(f.dressing_ratio, 0.2, epsilon = 1e-14);
        assert_abs_diff_eq!(f.pump_rate, 0.9245562130177514, epsilon = 1e-12);
        assert_abs_diff_eq!(f.decay_rate, 1.479289940828402e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(f.dephasing_rate, 3.698224852071006e-2, epsilon = 1e-14);
    }

    #[test]
    fn undriven_limit_and_undefined_dressing() {
        let f = dress(0.0, 2.0, 0.5).unwrap();
        assert_eq!(f.dressing_ratio, 0.0);
        assert_eq!(f.rabi, 2.0);
        assert_eq!(f.pump_rate, 0.5);
        assert_eq!(f.decay_rate, 0.0);
        assert!(matches!(dress(0.0, 0.0, 0.5), Err(ModelError::DressingUndefined)));
        assert!(matches!(dress(0.0, -1.0, 0.5), Err(ModelError::DressingUndefined)));
    }

    #[test]
    fn drive_spec_resolution() {
        let (o, d) = DriveSpec::AmplitudeRabi { amplitude: 10.0, rabi: 26.0 }.resolve().unwrap();
        assert_abs_diff_eq!(o, 10.0);
        assert_abs_diff_eq!(d, 24.0, epsilon = 1e-12);
        let (o, d) = DriveSpec::DetuningRabi { detuning: 24.0, rabi: 26.0 }.resolve().unwrap();
        assert_abs_diff_eq!(o, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d, 24.0);
        assert!(DriveSpec::AmplitudeRabi { amplitude: 30.0, rabi: 26.0 }.resolve().is_err());
        assert!(DriveSpec::DetuningRabi { detuning: -30.0, rabi: 26.0 }.resolve().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dress_is_scale_covariant(
            omega in 1e-3f64..1e3,
            delta in -1e3f64..1e3,
            lambda in 1e-3f64..1e3,
        ) {
            let a = dress(omega, delta, 0.7).unwrap();
            let b = dress(lambda * omega, lambda * delta, 0.7).unwrap();
            prop_assert!((a.dressing_ratio - b.dressing_ratio).abs() < 1e-12 * (1.0 + a.dressing_ratio));
            prop_assert!((a.mixing_angle - b.mixing_angle).abs() < 1e-12);
            prop_assert!((b.rabi - lambda * a.rabi).abs() < 1e-9 * b.rabi);
        }

        #[test]
        fn rate_sum_identity(omega in 1e-3f64..1e3, delta in -1e3f64..1e3, gamma in 1e-6f64..1.0) {
            // γ₊ + γ₋ + 2γ_z = γ
            let f = dress(omega, delta, gamma).unwrap();
            let total = f.pump_rate + f.decay_rate + 2.0 * f.dephasing_rate;
            prop_assert!((total - gamma).abs() < 1e-12 * gamma);
            prop_assert!((f.sin_theta.powi(2) + f.cos_theta.powi(2) - 1.0).abs() < 1e-14);
        }
    }
}
