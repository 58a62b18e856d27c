//! Physical constants (CODATA 2018 exact and recommended values).
//!
//! Every model in the crate takes a `&PhysicalConstants` rather than reading
//! globals, so alternative constant sets can be injected in tests. The values
//! themselves are fixed at compile time.

use std::f64::consts::PI;

/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Vacuum magnetic permeability, N/A^2.
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
/// Avogadro constant, 1/mol (exact).
pub const AVOGADRO: f64 = 6.022_140_76e23;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Planck constant, J s.
    pub h: f64,
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Bohr magneton, J/T.
    pub mu_b: f64,
    /// Vacuum permeability, N/A^2.
    pub mu_0: f64,
    /// Avogadro constant, 1/mol.
    pub n_a: f64,
}

impl PhysicalConstants {
    pub const CODATA2018: PhysicalConstants = PhysicalConstants {
        h: PLANCK,
        hbar: PLANCK / (2.0 * PI),
        k_b: BOLTZMANN,
        mu_b: BOHR_MAGNETON,
        mu_0: VACUUM_PERMEABILITY,
        n_a: AVOGADRO,
    };

    pub const fn codata2018() -> Self {
        Self::CODATA2018
    }

    /// Electron-like gyromagnetic ratio `g * mu_B / hbar`, rad/(s T).
    pub fn gyromagnetic_ratio(&self, g_factor: f64) -> f64 {
        g_factor * self.mu_b / self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA2018
    }
}

/// Angular rate (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Ordinary frequency (Hz) to angular rate (rad/s).
#[inline]
pub fn to_angular(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

/// dBm to watts.
#[inline]
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    10f64.powf((p_dbm - 30.0) / 10.0)
}
