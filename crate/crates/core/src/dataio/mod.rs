//! Instrument and interchange formats: Touchstone two-port files, sweep and
//! field-map CSV, and JSON result documents. Also home of the field-map type
//! and its synthetic generator.

mod csv;
mod json;
mod mapgen;
mod touchstone;

pub use self::csv::{
    parse_gc_points_csv, parse_map_csv, parse_sweep_csv, write_map_csv, write_sweep_csv,
};
pub use json::{write_result_json, JsonDoc, JsonValue, ToResultJson, SCHEMA};
pub use mapgen::{
    default_field_grid, default_freq_grid, generate_map, symmetric_grid, CouplingMode,
    DEFAULT_FIELD_HALF_SPAN, DEFAULT_FIELD_STEP, DEFAULT_FREQ_HALF_SPAN, DEFAULT_FREQ_STEP,
};
pub use touchstone::{parse_touchstone, write_touchstone, DataFormat, FreqUnit, TwoPortPoint};

use crate::error::{Error, Result};
use crate::spectral::{validate_grid, Spectrum, SpectrumMeta};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MapMeta {
    pub temperature_k: Option<f64>,
    pub power_dbm: Option<f64>,
}

/// Transmission on a (field x frequency) grid. Rows are field values.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMap {
    fields: Vec<f64>,
    freqs: Vec<f64>,
    s21_db: Vec<f64>,
    meta: MapMeta,
}

impl FieldMap {
    /// `s21_db` is row-major: `fields.len()` rows of `freqs.len()` values.
    pub fn new(fields: Vec<f64>, freqs: Vec<f64>, s21_db: Vec<f64>, meta: MapMeta) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidSpectrum("field map has no rows".into()));
        }
        if fields.windows(2).any(|w| w[1] <= w[0]) || fields.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidSpectrum(
                "field axis must be finite and strictly increasing".into(),
            ));
        }
        if freqs.len() < Spectrum::MIN_POINTS {
            return Err(Error::InvalidSpectrum(format!(
                "need at least {} frequencies, got {}",
                Spectrum::MIN_POINTS,
                freqs.len()
            )));
        }
        validate_grid(&freqs)?;
        if s21_db.len() != fields.len() * freqs.len() {
            return Err(Error::InvalidSpectrum(format!(
                "matrix has {} values, expected {} x {}",
                s21_db.len(),
                fields.len(),
                freqs.len()
            )));
        }
        if let Some(i) = s21_db.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "non-finite S21 at row {}, column {}",
                i / freqs.len(),
                i % freqs.len()
            )));
        }
        Ok(Self {
            fields,
            freqs,
            s21_db,
            meta,
        })
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn s21_db(&self) -> &[f64] {
        &self.s21_db
    }

    pub fn meta(&self) -> &MapMeta {
        &self.meta
    }

    pub fn n_rows(&self) -> usize {
        self.fields.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.freqs.len();
        &self.s21_db[i * n..(i + 1) * n]
    }

    /// One field row as a sweep.
    pub fn row_spectrum(&self, i: usize) -> Spectrum {
        let meta = SpectrumMeta {
            power_dbm: self.meta.power_dbm,
            temperature_k: self.meta.temperature_k,
            field_t: Some(self.fields[i]),
            impedance_ohm: None,
        };
        Spectrum::with_meta(self.freqs.clone(), self.row(i).to_vec(), meta)
            .expect("rows of a validated map are valid spectra")
    }
}
