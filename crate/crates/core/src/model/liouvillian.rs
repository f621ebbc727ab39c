//! Master-equation assembly for every model variant.

use super::hamiltonian::{build_hamiltonian, build_x_plus, quadrature};
use super::{
    CavityDissipator, DressedFrame, EmitterDissipator, ModelError, ModelVariant, OutputOperator,
    SystemParams,
};
use crate::feasibility::thermal_occupation;
use crate::qops::{
    annihilation, embed, lindblad_super, qubit_lower, qubit_raise, qubit_z, Operator, SuperOp,
};
use crate::units::angular_ps_to_si;
use num_complex::Complex64 as C64;

/// Hamiltonian, collapse channels and output operator of one variant,
/// before vectorization. Exposed so that sensor-augmented layouts can
/// extend each piece.
pub struct LiouvillianParts {
    pub hamiltonian: Operator,
    pub collapse: Vec<(f64, Operator)>,
    pub output: Operator,
    /// X⁺ on the system layout (equals `output` unless the variant outputs a).
    pub x_plus: Operator,
}

/// Collapse channels for the given variant: emitter decay in its bare or
/// secular dressed form, cavity decay through a or X⁺, and the optional
/// thermal pair on the cavity channel.
pub fn collapse_terms(
    p: &SystemParams,
    frame: &DressedFrame,
    variant: &ModelVariant,
    x_plus: &Operator,
) -> Result<Vec<(f64, Operator)>, ModelError> {
    let layout = p.layout();
    let zeta_p = embed(qubit_raise().view(), "emitter", &layout)?;
    let zeta_m = embed(qubit_lower().view(), "emitter", &layout)?;
    let zeta_z = embed(qubit_z().view(), "emitter", &layout)?;
    let a = embed(annihilation(p.n_max + 1).view(), "cavity", &layout)?;

    let mut terms: Vec<(f64, Operator)> = Vec::new();
    match variant.emitter_dissipator {
        EmitterDissipator::BareSigma => {
            // σ₋ = cs ζ_z + s² ζ₋ − c² ζ₊
            let (s, c) = (frame.sin_theta, frame.cos_theta);
            let sigma_m = &(&zeta_z.scaled(C64::new(c * s, 0.0))
                + &zeta_m.scaled(C64::new(s * s, 0.0)))
                - &zeta_p.scaled(C64::new(c * c, 0.0));
            terms.push((p.emitter_decay, sigma_m));
        }
        EmitterDissipator::DressedRates => {
            terms.push((frame.decay_rate, zeta_m));
            terms.push((frame.pump_rate, zeta_p));
            terms.push((frame.dephasing_rate, zeta_z));
        }
    }

    let jump = match variant.effective_cavity_dissipator() {
        CavityDissipator::StandardA => a,
        CavityDissipator::DressedX => x_plus.clone(),
    };
    if variant.thermal {
        if p.temperature < 0.0 {
            return Err(ModelError::NegativeTemperature(p.temperature));
        }
        let n_th = thermal_occupation(angular_ps_to_si(p.cavity_freq), p.temperature);
        terms.push((p.cavity_loss * (1.0 + n_th), jump.clone()));
        if n_th > 0.0 {
            terms.push((p.cavity_loss * n_th, jump.dag()));
        }
    } else {
        terms.push((p.cavity_loss, jump));
    }
    Ok(terms)
}

/// Hamiltonian, collapse channels and output operator on the system layout.
pub fn liouvillian_parts(
    p: &SystemParams,
    frame: &DressedFrame,
    variant: &ModelVariant,
) -> Result<LiouvillianParts, ModelError> {
    p.validate()?;
    let h = build_hamiltonian(p, frame, variant)?;
    let q = quadrature(p)?;
    let x_plus = match variant.hamiltonian {
        // the JC truncation has no counter-rotating terms, so a stands in
        super::HamiltonianForm::JaynesCummings => {
            embed(annihilation(p.n_max + 1).view(), "cavity", &p.layout())?
        }
        super::HamiltonianForm::Full => build_x_plus(&h, &q, p.cavity_freq)?,
    };
    let collapse = collapse_terms(p, frame, variant, &x_plus)?;
    let output = match variant.effective_output() {
        OutputOperator::A => embed(annihilation(p.n_max + 1).view(), "cavity", &p.layout())?,
        OutputOperator::XPlus => x_plus.clone(),
    };
    Ok(LiouvillianParts { hamiltonian: h, collapse, output, x_plus })
}

/// Vectorized master-equation generator plus the operator that enters all
/// output-flux and correlation formulas.
pub fn build_liouvillian(
    p: &SystemParams,
    frame: &DressedFrame,
    variant: &ModelVariant,
) -> Result<(SuperOp, Operator), ModelError> {
    let parts = liouvillian_parts(p, frame, variant)?;
    let l = lindblad_super(&parts.hamiltonian, &parts.collapse)?;
    Ok((l, parts.output))
}
