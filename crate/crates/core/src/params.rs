//! Shared domain types: resonator, spin species, ensemble and field point.
//!
//! Angular quantities are kept in rad/s throughout; conversion to Hz happens
//! only at reporting boundaries.

use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::ensemble::polarized_fraction;
use crate::error::{check, Result};

/// Default characteristic impedance of the feed line, ohm.
pub const DEFAULT_Z0: f64 = 50.0;
/// Effective magnetic width of the coplanar mode, including gaps and part of
/// the ground planes, m.
pub const DEFAULT_W_EFF: f64 = 400e-6;
/// Geometric width of the central strip, m.
pub const STRIP_WIDTH: f64 = 200e-6;

/// Bare resonator description. Insertion loss is a positive dB number with
/// `il = -S21(f0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams {
    f0: f64,
    q_loaded: f64,
    il_db: f64,
    z0: f64,
    w_eff: f64,
}

impl ResonatorParams {
    pub fn new(f0: f64, q_loaded: f64, il_db: f64, z0: f64, w_eff: f64) -> Result<Self> {
        check(f0 > 0.0, "f0", f0, "f0 > 0 Hz")?;
        check(q_loaded > 1.0, "q_loaded", q_loaded, "q_loaded > 1")?;
        check(il_db >= 0.0, "il_db", il_db, "il_db >= 0 dB")?;
        check(z0 > 0.0, "z0", z0, "z0 > 0 ohm")?;
        check(w_eff > 0.0, "w_eff", w_eff, "w_eff > 0 m")?;
        Ok(Self {
            f0,
            q_loaded,
            il_db,
            z0,
            w_eff,
        })
    }

    /// Resonator with the default line impedance and effective width.
    pub fn bare(f0: f64, q_loaded: f64, il_db: f64) -> Result<Self> {
        Self::new(f0, q_loaded, il_db, DEFAULT_Z0, DEFAULT_W_EFF)
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f0
    }

    pub fn q_loaded(&self) -> f64 {
        self.q_loaded
    }

    pub fn il_db(&self) -> f64 {
        self.il_db
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn w_eff(&self) -> f64 {
        self.w_eff
    }

    /// Cavity decay rate, rad/s.
    pub fn kappa(&self) -> f64 {
        kappa(self)
    }
}

/// Cavity energy decay rate `2 pi f0 / Q_L`, rad/s.
pub fn kappa(res: &ResonatorParams) -> f64 {
    2.0 * PI * res.f0 / res.q_loaded
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSpecies {
    g_factor: f64,
    t1: f64,
    t2: f64,
    gamma_s0: f64,
    molar_mass: f64,
    mass_density: f64,
}

impl SpinSpecies {
    /// * `gamma_s0` - intrinsic half-width linewidth, rad/s
    /// * `molar_mass` - g/mol
    /// * `mass_density` - g/cm^3
    pub fn new(
        g_factor: f64,
        t1: f64,
        t2: f64,
        gamma_s0: f64,
        molar_mass: f64,
        mass_density: f64,
    ) -> Result<Self> {
        check(
            g_factor > 1.5 && g_factor < 2.5,
            "g_factor",
            g_factor,
            "1.5 < g_factor < 2.5",
        )?;
        check(t1 > 0.0, "t1", t1, "t1 > 0 s")?;
        check(t2 > 0.0, "t2", t2, "t2 > 0 s")?;
        check(gamma_s0 >= 0.0, "gamma_s0", gamma_s0, "gamma_s0 >= 0 rad/s")?;
        check(
            molar_mass > 0.0,
            "molar_mass",
            molar_mass,
            "molar_mass > 0 g/mol",
        )?;
        check(
            mass_density > 0.0,
            "mass_density",
            mass_density,
            "mass_density > 0 g/cm^3",
        )?;
        Ok(Self {
            g_factor,
            t1,
            t2,
            gamma_s0,
            molar_mass,
            mass_density,
        })
    }

    /// DPPH radical: g = 2.0037, T1 = T2 = 62 ns, 3.9 MHz linewidth,
    /// 394.32 g/mol, 1.4 g/cm^3.
    pub fn dpph() -> Self {
        Self {
            g_factor: 2.0037,
            t1: 62e-9,
            t2: 62e-9,
            gamma_s0: 2.0 * PI * 3.9e6,
            molar_mass: 394.32,
            mass_density: 1.4,
        }
    }

    /// Copy with a different g-factor.
    pub fn with_g_factor(self, g_factor: f64) -> Result<Self> {
        Self::new(
            g_factor,
            self.t1,
            self.t2,
            self.gamma_s0,
            self.molar_mass,
            self.mass_density,
        )
    }

    /// Copy with different mass data (g/mol, g/cm^3).
    pub fn with_mass(self, molar_mass: f64, mass_density: f64) -> Result<Self> {
        Self::new(
            self.g_factor,
            self.t1,
            self.t2,
            self.gamma_s0,
            molar_mass,
            mass_density,
        )
    }

    /// Copy with different relaxation times, s.
    pub fn with_relaxation(self, t1: f64, t2: f64) -> Result<Self> {
        Self::new(
            self.g_factor,
            t1,
            t2,
            self.gamma_s0,
            self.molar_mass,
            self.mass_density,
        )
    }

    pub fn g_factor(&self) -> f64 {
        self.g_factor
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn gamma_s0(&self) -> f64 {
        self.gamma_s0
    }

    pub fn molar_mass(&self) -> f64 {
        self.molar_mass
    }

    pub fn mass_density(&self) -> f64 {
        self.mass_density
    }
}

/// A spin ensemble in thermal equilibrium at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleState {
    n_total: f64,
    temperature: f64,
    volume: f64,
    n_polarized: f64,
}

impl EnsembleState {
    /// Ensemble of `n_total` spins with transition frequency `f` (Hz) held at
    /// `temperature` (K); the polarized count follows from the thermal
    /// population imbalance.
    pub fn thermal(
        n_total: f64,
        temperature: f64,
        volume: f64,
        f: f64,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        check(n_total >= 0.0, "n_total", n_total, "n_total >= 0")?;
        check(volume >= 0.0, "volume", volume, "volume >= 0 m^3")?;
        let fraction = polarized_fraction(f, temperature, consts)?;
        Ok(Self {
            n_total,
            temperature,
            volume,
            n_polarized: n_total * fraction,
        })
    }

    pub fn n_total(&self) -> f64 {
        self.n_total
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn n_polarized(&self) -> f64 {
        self.n_polarized
    }
}

/// Applied field and the spin resonance field, both in tesla.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint {
    b: f64,
    b_res: f64,
}

impl FieldPoint {
    pub fn new(b: f64, b_res: f64) -> Result<Self> {
        check(b >= 0.0, "b", b, "b >= 0 T")?;
        check(b_res >= 0.0, "b_res", b_res, "b_res >= 0 T")?;
        Ok(Self { b, b_res })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn b_res(&self) -> f64 {
        self.b_res
    }

    pub fn with_b(self, b: f64) -> Result<Self> {
        Self::new(b, self.b_res)
    }
}

/// Zeeman detuning `g mu_B (B - B_r) / hbar`, rad/s. Negative below the
/// resonance field.
pub fn detuning(fp: &FieldPoint, species: &SpinSpecies, consts: &PhysicalConstants) -> f64 {
    detuning_from_offset(fp.b - fp.b_res, species.g_factor, consts)
}

pub(crate) fn detuning_from_offset(db: f64, g_factor: f64, consts: &PhysicalConstants) -> f64 {
    g_factor * consts.mu_b * db / consts.hbar
}
