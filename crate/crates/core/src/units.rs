//! Unit conventions and physical constants.
//!
//! All angular frequencies and rates inside the simulation are stored in
//! rad/ps; times are in ps. Constructors accept ordinary frequencies
//! ν = ω/2π in THz, which is how every cavity/drive parameter is quoted.
//! The feasibility module works in SI instead (W, Hz, K, m, Debye) and
//! converts at its own boundary.

/// 2π.
pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Ordinary frequency in THz → angular frequency in rad/ps.
pub fn thz_to_angular(nu_thz: f64) -> f64 {
    TWO_PI * nu_thz
}

/// Angular frequency in rad/ps → ordinary frequency in THz.
pub fn angular_to_thz(omega: f64) -> f64 {
    omega / TWO_PI
}

/// Angular frequency in rad/ps → rad/s.
pub fn angular_ps_to_si(omega: f64) -> f64 {
    omega * 1e12
}

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Vacuum wave impedance, Ω.
pub const VACUUM_IMPEDANCE: f64 = 376.730313668;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.99792458e8;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;

/// One Debye in C·m.
pub const DEBYE: f64 = 3.33564e-30;
