//! Experimental estimators: intracavity photon number, vacuum field and
//! single-spin coupling, and the half-power bandwidth quality factor.

use std::f64::consts::PI;

use crate::constants::{dbm_to_watts, PhysicalConstants};
use crate::error::{check, Error, Result};
use crate::params::{ResonatorParams, SpinSpecies};
use crate::spectral::Spectrum;

/// Half-power drop below the peak, dB (10 log10 2).
pub const HALF_POWER_DB: f64 = 3.010_299_956_639_812;

/// Ratio below which `N_ph << N_p` is considered satisfied.
pub const PHOTON_ADVISORY_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonEstimate {
    /// Circulating power, W.
    pub p_circ: f64,
    /// Intracavity photon number.
    pub n_ph: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumFieldEstimate {
    /// Zero-point current, A.
    pub i_vac: f64,
    /// Vacuum magnetic field at the sample, T.
    pub b_vac: f64,
    /// Single-spin coupling, rad/s.
    pub g_single: f64,
}

/// Incident power at the resonator input when `p_out_dbm` leaves the
/// analyzer through a coaxial line with round-trip loss `coax_il_db`.
pub fn incident_power_dbm(p_out_dbm: f64, coax_il_db: f64) -> f64 {
    p_out_dbm - coax_il_db / 2.0
}

/// Circulating power `P_inc Q_L 10^(-IL/20) / pi` and photon number
/// `P_circ / (h f0^2)`.
pub fn photon_number(
    res: &ResonatorParams,
    p_inc_dbm: f64,
    consts: &PhysicalConstants,
) -> PhotonEstimate {
    let p_inc = dbm_to_watts(p_inc_dbm);
    let p_circ = p_inc * res.q_loaded() * 10f64.powf(-res.il_db() / 20.0) / PI;
    let n_ph = p_circ / (consts.h * res.f0() * res.f0());
    PhotonEstimate { p_circ, n_ph }
}

/// Uniform-field estimate of the vacuum current, field and single-spin
/// coupling: `I = pi sqrt(h/Z0) f0`, `B = mu0 I / (2 w)`,
/// `g_s = 2 pi g mu_B B / (4 h)`.
pub fn vacuum_field(
    res: &ResonatorParams,
    species: &SpinSpecies,
    consts: &PhysicalConstants,
) -> VacuumFieldEstimate {
    vacuum_field_at(res.f0(), res.z0(), res.w_eff(), species.g_factor(), consts)
}

/// [`vacuum_field`] from bare numbers: `f0` in Hz, `z0` in ohm, `w_eff` in m.
pub fn vacuum_field_at(
    f0: f64,
    z0: f64,
    w_eff: f64,
    g_factor: f64,
    consts: &PhysicalConstants,
) -> VacuumFieldEstimate {
    let i_vac = PI * (consts.h / z0).sqrt() * f0;
    let b_vac = consts.mu_0 * i_vac / (2.0 * w_eff);
    let g_single = 2.0 * PI * g_factor * consts.mu_b * b_vac / (4.0 * consts.h);
    VacuumFieldEstimate {
        i_vac,
        b_vac,
        g_single,
    }
}

/// Loaded Q from the half-power bandwidth of the dominant peak. Crossings
/// are located by linear interpolation between neighbouring samples.
pub fn q_from_3db(spec: &Spectrum) -> Result<f64> {
    let (f, y) = (spec.freqs(), spec.s21_db());
    let peak = spec.argmax();
    if peak == 0 || peak + 1 == f.len() {
        return Err(Error::NoPeak);
    }
    let level = y[peak] - HALF_POWER_DB;
    let crossing = |i: usize, j: usize| f[i] + (level - y[i]) * (f[j] - f[i]) / (y[j] - y[i]);

    let lower = (0..peak)
        .rev()
        .find(|&i| y[i] < level)
        .map(|i| crossing(i, i + 1))
        .ok_or(Error::BandwidthUnresolved { side: "lower" })?;
    let upper = (peak + 1..f.len())
        .find(|&i| y[i] < level)
        .map(|i| crossing(i - 1, i))
        .ok_or(Error::BandwidthUnresolved { side: "upper" })?;
    Ok(f[peak] / (upper - lower))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonAdvisory {
    /// `n_ph / n_polarized`; infinite when no spins are polarized.
    pub ratio: f64,
    /// True when the ratio is below [`PHOTON_ADVISORY_THRESHOLD`].
    pub low_excitation: bool,
}

/// Checks the linear-regime condition `N_ph << N_p`.
pub fn photons_vs_polarized_advisory(n_ph: f64, n_polarized: f64) -> Result<PhotonAdvisory> {
    check(n_ph >= 0.0, "n_ph", n_ph, "n_ph >= 0")?;
    check(
        n_polarized >= 0.0,
        "n_polarized",
        n_polarized,
        "n_polarized >= 0",
    )?;
    let ratio = if n_polarized == 0.0 {
        f64::INFINITY
    } else {
        n_ph / n_polarized
    };
    Ok(PhotonAdvisory {
        ratio,
        low_excitation: ratio < PHOTON_ADVISORY_THRESHOLD,
    })
}
