//! Thermal polarization, collective coupling and linewidth of the spin
//! ensemble.

use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{check, Result};
use crate::params::SpinSpecies;

/// Microwave drive at the sample position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    p_inc_dbm: f64,
    b1: f64,
}

impl DriveParams {
    /// * `p_inc_dbm` - incident power at the input capacitor, dBm
    /// * `b1` - microwave field amplitude at the sample, T
    pub fn new(p_inc_dbm: f64, b1: f64) -> Result<Self> {
        check(p_inc_dbm.is_finite(), "p_inc_dbm", p_inc_dbm, "finite dBm")?;
        check(b1 >= 0.0, "b1", b1, "b1 >= 0 T")?;
        Ok(Self { p_inc_dbm, b1 })
    }

    /// Vanishing drive (B1 = 0).
    pub fn weak() -> Self {
        Self {
            p_inc_dbm: f64::NEG_INFINITY,
            b1: 0.0,
        }
    }

    pub fn p_inc_dbm(&self) -> f64 {
        self.p_inc_dbm
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }
}

/// Fraction of polarized spin-1/2 centers, `tanh(h f / (2 k_B T))`.
pub fn polarized_fraction(f: f64, t: f64, consts: &PhysicalConstants) -> Result<f64> {
    check(f > 0.0, "f", f, "f > 0 Hz")?;
    check(t > 0.0, "temperature", t, "temperature > 0 K")?;
    Ok((consts.h * f / (2.0 * consts.k_b * t)).tanh())
}

/// `g_single * sqrt(n_polarized)`, rad/s.
pub fn collective_coupling(g_single: f64, n_polarized: f64) -> Result<f64> {
    check(
        n_polarized >= 0.0,
        "n_polarized",
        n_polarized,
        "n_polarized >= 0",
    )?;
    Ok(g_single * n_polarized.sqrt())
}

/// Collective coupling at temperature `t` given its zero-temperature value
/// `prefactor` (rad/s).
pub fn gc_of_temperature(
    prefactor: f64,
    f: f64,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<f64> {
    Ok(prefactor * polarized_fraction(f, t, consts)?.sqrt())
}

/// Homogeneous half-width linewidth including power broadening, rad/s:
/// `1/(2 T1) + (1/T2) sqrt(1 + gamma^2 B1^2 T1 T2)` with `gamma = g mu_B / hbar`.
pub fn linewidth(species: &SpinSpecies, drive: &DriveParams, consts: &PhysicalConstants) -> f64 {
    let gamma = consts.gyromagnetic_ratio(species.g_factor());
    let (t1, t2) = (species.t1(), species.t2());
    let b1 = drive.b1();
    1.0 / (2.0 * t1) + (1.0 + gamma * gamma * b1 * b1 * t1 * t2).sqrt() / t2
}

/// Spin number density, 1/m^3.
pub fn spin_density(species: &SpinSpecies, consts: &PhysicalConstants) -> f64 {
    // g/cm^3 * 1/mol / (g/mol) = 1/cm^3
    species.mass_density() * consts.n_a / species.molar_mass() * 1e6
}

/// Number of radicals in a sample of `volume` m^3.
pub fn radical_count(
    volume: f64,
    species: &SpinSpecies,
    consts: &PhysicalConstants,
) -> Result<f64> {
    check(volume > 0.0, "volume", volume, "volume > 0 m^3")?;
    Ok(spin_density(species, consts) * volume)
}

/// Low-temperature anchor of the empirical DPPH linewidth.
pub const LINEWIDTH_LOW_T: (f64, f64) = (2.0, 14e6);
/// Plateau anchor: the linewidth is flat from here up to room temperature.
pub const LINEWIDTH_PLATEAU_T: (f64, f64) = (10.0, 3.9e6);

/// Empirical DPPH linewidth (half width, rad/s) against temperature.
///
/// Lookup, not a model: 14 MHz at 2 K, 3.9 MHz from 10 K upward, and
/// `ln(gamma)` linear in T between the two. Below 2 K the 2 K value is
/// returned.
pub fn effective_linewidth_at(t: f64) -> f64 {
    let (t_lo, g_lo) = LINEWIDTH_LOW_T;
    let (t_hi, g_hi) = LINEWIDTH_PLATEAU_T;
    let hz = if t <= t_lo {
        g_lo
    } else if t >= t_hi {
        g_hi
    } else {
        let s = (t - t_lo) / (t_hi - t_lo);
        (g_lo.ln() + s * (g_hi.ln() - g_lo.ln())).exp()
    };
    2.0 * PI * hz
}
