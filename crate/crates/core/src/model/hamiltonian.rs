//! Dressed-frame Hamiltonian and the positive-frequency output operator.

use super::{DressedFrame, HamiltonianForm, ModelError, ModelVariant, SystemParams};
use crate::qops::{
    annihilation, eig_hermitian, embed, qubit_lower, qubit_raise, qubit_z, Operator, QopsError,
};
use ndarray::Array2;
use num_complex::Complex64 as C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// a + a† on the full layout.
pub fn quadrature(p: &SystemParams) -> Result<Operator, QopsError> {
    let layout = p.layout();
    let a = embed(annihilation(p.n_max + 1).view(), "cavity", &layout)?;
    Ok(&a + &a.dag())
}

/// Rotating-frame Hamiltonian in the dressed basis.
///
/// The full form is
///   H = (Ω_R/2) ζ_z + ω_c a†a − 2csχ (a ζ₊ + a† ζ₋) − 2csχ (a ζ₋ + a† ζ₊)
///     + χ (a + a†) [1 + (s² − c²) ζ_z],
/// and the Jaynes-Cummings form keeps only the first three terms.
pub fn build_hamiltonian(
    p: &SystemParams,
    frame: &DressedFrame,
    variant: &ModelVariant,
) -> Result<Operator, ModelError> {
    p.validate()?;
    let layout = p.layout();
    let a = embed(annihilation(p.n_max + 1).view(), "cavity", &layout)?;
    let ad = a.dag();
    let zeta_p = embed(qubit_raise().view(), "emitter", &layout)?;
    let zeta_m = embed(qubit_lower().view(), "emitter", &layout)?;
    let zeta_z = embed(qubit_z().view(), "emitter", &layout)?;
    let (s, c) = (frame.sin_theta, frame.cos_theta);
    let g = 2.0 * c * s * p.coupling;

    let jc = &zeta_z.scaled(re(frame.rabi / 2.0))
        + &(&(&a.dag() * &a).scaled(re(p.cavity_freq))
            - &(&(&a * &zeta_p) + &(&ad * &zeta_m)).scaled(re(g)));
    let h = match variant.hamiltonian {
        HamiltonianForm::JaynesCummings => jc,
        HamiltonianForm::Full => {
            let counter = (&(&a * &zeta_m) + &(&ad * &zeta_p)).scaled(re(g));
            let x = &a + &ad;
            let ident = Operator::identity(layout.clone());
            let disp = &x * &(&ident + &zeta_z.scaled(re(s * s - c * c)));
            &(&jc - &counter) + &disp.scaled(re(p.coupling))
        }
    };
    Ok(h)
}

/// Relative spectral gap below which a transition counts as degenerate and
/// is dropped from X⁺; its √(ω_kj/ω_c) weight vanishes there anyway, and the
/// cutoff keeps rounding noise from feeding the square root a negative gap.
pub const DEGENERACY_CUTOFF: f64 = 1e-9;

/// Positive-frequency part of a quadrature in the eigenbasis of H:
/// X⁺ = Σ_{j, k>j} √(ω_kj/ω_c) ⟨j|q|k⟩ |j⟩⟨k|, eigenstates sorted ascending.
///
/// The Ohmic √(ω_kj/ω_c) weight makes this the physical jump and output
/// operator in the presence of counter-rotating terms.
pub fn build_x_plus(
    h: &Operator,
    quadrature: &Operator,
    omega_c: f64,
) -> Result<Operator, ModelError> {
    if h.layout() != quadrature.layout() {
        return Err(ModelError::Qops(QopsError::LayoutMismatch));
    }
    let (energies, v) = eig_hermitian(h)?;
    let n = h.dim();
    // quadrature in the eigenbasis: X̃ = V† q V
    let q = quadrature.data();
    let qv = q.dot(&v);
    let vdag = Array2::from_shape_fn((n, n), |(i, j)| v[(j, i)].conj());
    let x_eig = vdag.dot(&qv);
    let mut up = Array2::<C64>::zeros((n, n));
    let cutoff = DEGENERACY_CUTOFF * omega_c;
    for j in 0..n {
        for k in (j + 1)..n {
            let gap = energies[k] - energies[j];
            if gap <= cutoff {
                continue;
            }
            up[(j, k)] = re((gap / omega_c).sqrt()) * x_eig[(j, k)];
        }
    }
    // back to the product basis: X⁺ = V X̃⁺ V†
    let data = v.dot(&up).dot(&vdag);
    Ok(Operator::from_dense(h.layout().clone(), data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dress, DriveSpec};
    use crate::units::{thz_to_angular, TWO_PI};
    use approx::assert_abs_diff_eq;

    fn fig1c_params() -> SystemParams {
        SystemParams::from_thz(
            0.05,
            0.158,
            0.0005,
            26.0,
            DriveSpec::AmplitudeRabi { amplitude: 10.0, rabi: 26.0 },
        )
        .unwrap()
    }

    #[test]
    fn decoupled_hamiltonian_is_diagonal() {
        // χ = 0 → H diagonal with entries m ω_c ± Ω_R/2
        let mut p = fig1c_params();
        p.coupling = 0.0;
        let frame = p.dressed().unwrap();
        let h = build_hamiltonian(&p, &frame, &ModelVariant::default()).unwrap();
        let n = h.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!(h.data()[(i, j)].norm() < 1e-14);
                }
            }
        }
        let (vals, _) = eig_hermitian(&h).unwrap();
        let mut expect: Vec<f64> = (0..=p.n_max)
            .flat_map(|m| {
                let base = m as f64 * p.cavity_freq;
                [base - frame.rabi / 2.0, base + frame.rabi / 2.0]
            })
            .collect();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in vals.iter().zip(expect) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-10);
        }
    }

    #[test]
    fn full_hamiltonian_is_hermitian() {
        let p = fig1c_params();
        let frame = p.dressed().unwrap();
        let h = build_hamiltonian(&p, &frame, &ModelVariant::default()).unwrap();
        assert!(h.hermiticity_residual() < 1e-13);
    }

    #[test]
    fn jc_one_excitation_doublet_splitting() {
        // at Ω_R = ω_c the one-excitation doublet splits by 4csχ,
        // 2π · 0.03846 THz for h = 0.2, χ/2π = 0.05
        let p = fig1c_params();
        let frame = p.dressed().unwrap();
        let variant = ModelVariant {
            hamiltonian: HamiltonianForm::JaynesCummings,
            ..ModelVariant::default()
        };
        let h = build_hamiltonian(&p, &frame, &variant).unwrap();
        let (vals, _) = eig_hermitian(&h).unwrap();
        // levels 1 and 2 are the one-excitation doublet
        let split = vals[2] - vals[1];
        let want = 4.0 * frame.cos_theta * frame.sin_theta * p.coupling;
        assert_abs_diff_eq!(split, want, epsilon = 1e-10);
        assert_abs_diff_eq!(split / TWO_PI, 0.038461538, epsilon = 1e-7);
    }

    #[test]
    fn x_plus_reduces_to_a_when_decoupled() {
        let mut p = fig1c_params();
        p.coupling = 0.0;
        let frame = p.dressed().unwrap();
        let h = build_hamiltonian(&p, &frame, &ModelVariant::default()).unwrap();
        let q = quadrature(&p).unwrap();
        let x = build_x_plus(&h, &q, p.cavity_freq).unwrap();
        let layout = p.layout();
        let a = embed(annihilation(p.n_max + 1).view(), "cavity", &layout).unwrap();
        let diff: f64 = (x.data() - a.data()).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-9, "‖X⁺ − a‖ = {diff:.3e}");
    }

    #[test]
    fn x_plus_annihilates_ground_state() {
        // ⟨k₀|X⁻X⁺|k₀⟩ = 0 for the lowest eigenstate
        let p = fig1c_params();
        let frame = p.dressed().unwrap();
        let h = build_hamiltonian(&p, &frame, &ModelVariant::default()).unwrap();
        let q = quadrature(&p).unwrap();
        let x = build_x_plus(&h, &q, p.cavity_freq).unwrap();
        let (_, v) = eig_hermitian(&h).unwrap();
        let n = h.dim();
        let ground: Vec<C64> = (0..n).map(|i| v[(i, 0)]).collect();
        let xg: Vec<C64> = (0..n)
            .map(|i| (0..n).map(|j| x.data()[(i, j)] * ground[j]).sum())
            .collect();
        let norm: f64 = xg.iter().map(|v| v.norm_sqr()).sum();
        assert!(norm < 1e-20, "‖X⁺|k₀⟩‖² = {norm:.3e}");
    }

    #[test]
    fn x_plus_close_to_a_at_weak_coupling() {
        // χ/ω_c ≈ 0.0019 at the reference point → ‖X⁺ − a‖_F/‖a‖_F < 0.05
        let p = fig1c_params();
        let frame = p.dressed().unwrap();
        let h = build_hamiltonian(&p, &frame, &ModelVariant::default()).unwrap();
        let q = quadrature(&p).unwrap();
        let x = build_x_plus(&h, &q, p.cavity_freq).unwrap();
        let layout = p.layout();
        let a = embed(annihilation(p.n_max + 1).view(), "cavity", &layout).unwrap();
        let num: f64 = (x.data() - a.data()).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = a.data().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        assert!(num / den < 0.05, "relative deviation {:.4}", num / den);
    }

    #[test]
    fn x_plus_upper_triangular_in_eigenbasis() {
        let p = fig1c_params();
        let frame = p.dressed().unwrap();
        let h = build_hamiltonian(&p, &frame, &ModelVariant::default()).unwrap();
        let q = quadrature(&p).unwrap();
        let x = build_x_plus(&h, &q, p.cavity_freq).unwrap();
        let (_, v) = eig_hermitian(&h).unwrap();
        let n = h.dim();
        let vdag = Array2::from_shape_fn((n, n), |(i, j)| v[(j, i)].conj());
        let x_eig = vdag.dot(x.data()).dot(&v);
        for j in 0..n {
            for k in 0..=j {
                assert!(
                    x_eig[(j, k)].norm() < 1e-10,
                    "lower/diagonal element ({j},{k}) = {:.3e}",
                    x_eig[(j, k)].norm()
                );
            }
        }
    }

    #[test]
    fn x_plus_rejects_non_hermitian() {
        let p = fig1c_params();
        let q = quadrature(&p).unwrap();
        let layout = p.layout();
        let a = embed(annihilation(p.n_max + 1).view(), "cavity", &layout).unwrap();
        assert!(build_x_plus(&a, &q, p.cavity_freq).is_err());
    }

    #[test]
    fn thz_constructor_applies_two_pi() {
        let p = fig1c_params();
        assert_abs_diff_eq!(p.cavity_freq, thz_to_angular(26.0));
        assert_abs_diff_eq!(p.coupling, TWO_PI * 0.05);
        assert_abs_diff_eq!(p.drive_detuning, TWO_PI * 24.0, epsilon = 1e-10);
    }
}
