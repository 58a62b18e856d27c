use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FieldMap, MapMeta};
use crate::constants::PhysicalConstants;
use crate::ensemble::{effective_linewidth_at, gc_of_temperature};
use crate::error::{check, Result};
use crate::spectral::{add_noise_db, coupled_s21, CoupledSystem};

/// Field step of the default synthetic grid, T.
pub const DEFAULT_FIELD_STEP: f64 = 0.2e-3;
/// Half-width of the default field window around the resonance field, T.
pub const DEFAULT_FIELD_HALF_SPAN: f64 = 15e-3;
/// Frequency step of the default synthetic grid, Hz.
pub const DEFAULT_FREQ_STEP: f64 = 50e3;
/// Half-width of the default frequency window around f0, Hz.
pub const DEFAULT_FREQ_HALF_SPAN: f64 = 150e6;

/// How a map row obtains its coupling and spin linewidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// The base system's `g_collective` is the zero-temperature coupling; each
    /// map uses the thermally reduced value and the empirical linewidth at
    /// the map temperature.
    Thermal,
    /// Use the base system's coupling and linewidth unchanged.
    AsGiven,
}

/// Symmetric grid `center + k * step` for `k = -n..=n`, `n = round(half_span / step)`.
/// The center value is included exactly.
pub fn symmetric_grid(center: f64, half_span: f64, step: f64) -> Result<Vec<f64>> {
    check(step > 0.0, "step", step, "step > 0")?;
    check(half_span >= 0.0, "half_span", half_span, "half_span >= 0")?;
    let n = (half_span / step).round() as i64;
    Ok((-n..=n).map(|k| center + k as f64 * step).collect())
}

/// Resonance field +- 15 mT in 0.2 mT steps.
pub fn default_field_grid(b_res: f64) -> Vec<f64> {
    symmetric_grid(b_res, DEFAULT_FIELD_HALF_SPAN, DEFAULT_FIELD_STEP).expect("constant grid")
}

/// f0 +- 150 MHz in 50 kHz steps.
pub fn default_freq_grid(f0: f64) -> Vec<f64> {
    symmetric_grid(f0, DEFAULT_FREQ_HALF_SPAN, DEFAULT_FREQ_STEP).expect("constant grid")
}

/// Synthetic field-swept transmission map.
///
/// Each row rebuilds `base` at its field value and evaluates the damped
/// coupled lineshape on `freqs`; Gaussian noise (dB) is drawn from one
/// seeded stream, row by row.
#[allow(clippy::too_many_arguments)]
pub fn generate_map(
    base: &CoupledSystem,
    mode: CouplingMode,
    fields: &[f64],
    freqs: &[f64],
    temperature_k: f64,
    noise_sigma_db: f64,
    seed: u64,
    consts: &PhysicalConstants,
) -> Result<FieldMap> {
    check(
        temperature_k > 0.0,
        "temperature_k",
        temperature_k,
        "temperature_k > 0 K",
    )?;
    check(
        noise_sigma_db >= 0.0,
        "noise_sigma_db",
        noise_sigma_db,
        "noise_sigma_db >= 0 dB",
    )?;
    let sys = match mode {
        CouplingMode::AsGiven => *base,
        CouplingMode::Thermal => {
            let g = gc_of_temperature(
                base.g_collective(),
                base.resonator().f0(),
                temperature_k,
                consts,
            )?;
            base.with_coupling(g, effective_linewidth_at(temperature_k))?
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(fields.len() * freqs.len());
    for &b in fields {
        let row_sys = sys.with_field(b)?;
        let start = values.len();
        for &f in freqs {
            values.push(coupled_s21(&row_sys, f, consts)?);
        }
        add_noise_db(&mut values[start..], noise_sigma_db, &mut rng)?;
    }
    FieldMap::new(
        fields.to_vec(),
        freqs.to_vec(),
        values,
        MapMeta {
            temperature_k: Some(temperature_k),
            power_dbm: None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::to_angular;
    use crate::params::{FieldPoint, ResonatorParams, SpinSpecies};
    use crate::peaks::find_peaks;
    use crate::spectral::lorentzian_s21;

    const C: PhysicalConstants = PhysicalConstants::CODATA2018;

    fn base(prefactor_hz: f64) -> CoupledSystem {
        let res = ResonatorParams::bare(7.7522e9, 16000.0, 33.5).unwrap();
        CoupledSystem::new(
            res,
            to_angular(prefactor_hz),
            to_angular(3.9e6),
            FieldPoint::new(0.276, 0.276).unwrap(),
            SpinSpecies::dpph(),
        )
        .unwrap()
    }

    #[test]
    fn default_grids() {
        let f = default_field_grid(0.276);
        assert_eq!(f.len(), 151);
        assert_eq!(f[75], 0.276);
        let g = default_freq_grid(7.7522e9);
        assert_eq!(g.len(), 6001);
        assert_eq!(g[3000], 7.7522e9);
    }

    #[test]
    fn zero_coupling_rows_are_bare_lorentzian() {
        let sys = base(0.0);
        let fields = symmetric_grid(0.276, 2e-3, 1e-3).unwrap();
        let freqs = symmetric_grid(7.7522e9, 5e6, 100e3).unwrap();
        let map = generate_map(
            &sys,
            CouplingMode::Thermal,
            &fields,
            &freqs,
            2.0,
            0.0,
            1,
            &C,
        )
        .unwrap();
        for i in 0..map.n_rows() {
            for (f, v) in freqs.iter().zip(map.row(i)) {
                let bare = lorentzian_s21(sys.resonator(), *f).unwrap();
                assert!((v - bare).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn same_seed_same_map() {
        let sys = base(134e6);
        let fields = symmetric_grid(0.276, 1e-3, 0.5e-3).unwrap();
        let freqs = symmetric_grid(7.7522e9, 100e6, 1e6).unwrap();
        let a = generate_map(
            &sys,
            CouplingMode::Thermal,
            &fields,
            &freqs,
            2.0,
            0.1,
            8,
            &C,
        )
        .unwrap();
        let b = generate_map(
            &sys,
            CouplingMode::Thermal,
            &fields,
            &freqs,
            2.0,
            0.1,
            8,
            &C,
        )
        .unwrap();
        let bits = |m: &FieldMap| m.s21_db().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    fn resonant_peak_count(t: f64) -> usize {
        let sys = base(134e6);
        let freqs = default_freq_grid(7.7522e9);
        let map =
            generate_map(&sys, CouplingMode::Thermal, &[0.276], &freqs, t, 0.0, 0, &C).unwrap();
        find_peaks(&freqs, map.row(0), 3.0).len()
    }

    #[test]
    fn splitting_persists_through_forty_kelvin() {
        for t in [2.0, 5.0, 10.0, 20.0, 40.0] {
            assert_eq!(resonant_peak_count(t), 2, "T = {t}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let sys = base(134e6);
        assert!(generate_map(
            &sys,
            CouplingMode::Thermal,
            &[0.276],
            &[7e9, 8e9, 9e9],
            0.0,
            0.0,
            0,
            &C
        )
        .is_err());
        assert!(generate_map(
            &sys,
            CouplingMode::Thermal,
            &[0.276],
            &[7e9, 8e9, 9e9],
            2.0,
            -1.0,
            0,
            &C
        )
        .is_err());
    }
}
