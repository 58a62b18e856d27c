use std::f64::consts::LN_10;

use nalgebra::DMatrix;

use super::lm::{nlls_minimize, LmOptions, ResidualModel};
use super::FitResult;
use crate::error::Result;
use crate::estimators::q_from_3db;
use crate::params::{ResonatorParams, DEFAULT_W_EFF, DEFAULT_Z0};
use crate::peaks::parabolic_vertex;
use crate::spectral::Spectrum;

const NAMES: [&str; 3] = ["f0_hz", "q_loaded", "il_db"];

/// Residuals `data - model` of the bare-resonator lineshape in dB, with
/// parameters `[f0, Q_L, IL]`.
pub struct LorentzianResiduals<'a> {
    pub freqs: &'a [f64],
    pub data_db: &'a [f64],
}

impl LorentzianResiduals<'_> {
    fn model(f: f64, p: &[f64]) -> f64 {
        let x = (f - p[0]) * (f + p[0]) / (f * p[0]);
        -p[2] - 10.0 * (p[1] * p[1] * x * x).ln_1p() / LN_10
    }
}

impl ResidualModel for LorentzianResiduals<'_> {
    fn n_residuals(&self) -> usize {
        self.freqs.len()
    }

    fn residuals(&self, p: &[f64], out: &mut [f64]) {
        for ((o, &f), &y) in out.iter_mut().zip(self.freqs).zip(self.data_db) {
            *o = y - Self::model(f, p);
        }
    }

    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) -> bool {
        let (f0, q) = (p[0], p[1]);
        let k = 10.0 / LN_10;
        for (i, &f) in self.freqs.iter().enumerate() {
            let x = (f - f0) * (f + f0) / (f * f0);
            let denom = 1.0 + q * q * x * x;
            let dx_df0 = -f / (f0 * f0) - 1.0 / f;
            // r = y - m, so dr/dp = -dm/dp
            jac[(i, 0)] = k * 2.0 * q * q * x * dx_df0 / denom;
            jac[(i, 1)] = k * 2.0 * q * x * x / denom;
            jac[(i, 2)] = 1.0;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianFit {
    pub resonator: ResonatorParams,
    pub fit: FitResult,
}

/// Fit the bare-resonator lineshape to `spec` in dB space.
///
/// Without `init`, the start point comes from the peak sample (f0, IL) and
/// the half-power bandwidth (Q_L). Line impedance and effective width are
/// carried over from `init` when given.
pub fn fit_lorentzian(
    spec: &Spectrum,
    init: Option<&ResonatorParams>,
    opts: &LmOptions,
) -> Result<LorentzianFit> {
    let start = match init {
        Some(r) => [r.f0(), r.q_loaded(), r.il_db()],
        None => initial_guess(spec)?,
    };
    let model = LorentzianResiduals {
        freqs: spec.freqs(),
        data_db: spec.s21_db(),
    };
    let mut fit = nlls_minimize(&model, &start, &NAMES, opts)?;
    fit.residual_unit = "db";
    let (z0, w_eff) = init.map_or((DEFAULT_Z0, DEFAULT_W_EFF), |r| (r.z0(), r.w_eff()));
    let resonator =
        ResonatorParams::new(fit.params[0], fit.params[1].abs(), fit.params[2], z0, w_eff)?;
    fit.params[1] = resonator.q_loaded();
    Ok(LorentzianFit { resonator, fit })
}

/// Automatic start point `[f0_hz, q_loaded, il_db]`: peak vertex and
/// half-power bandwidth.
pub fn initial_guess(spec: &Spectrum) -> Result<[f64; 3]> {
    let q = q_from_3db(spec)?;
    let i = spec.argmax();
    let (f, y) = (spec.freqs(), spec.s21_db());
    let (f0, peak) = parabolic_vertex([f[i - 1], f[i], f[i + 1]], [y[i - 1], y[i], y[i + 1]]);
    Ok([f0, q, (-peak).max(0.0)])
}
