//! Forward models, fits and estimators for transmission spectroscopy of a
//! microwave resonator coupled to a paramagnetic spin ensemble.
//!
//! Angular frequencies (rad/s) are used inside the models; fit results and
//! file formats report ordinary frequencies in Hz.

pub mod constants;
pub mod dataio;
pub mod ensemble;
pub mod error;
pub mod estimators;
pub mod fit;
pub mod params;
pub mod peaks;
pub mod spectral;
pub mod tc;

pub use constants::PhysicalConstants;
pub use dataio::FieldMap;
pub use error::{Error, ParseError, Result};
pub use fit::{FitResult, LmOptions};
pub use params::{EnsembleState, FieldPoint, ResonatorParams, SpinSpecies};
pub use spectral::{CoupledSystem, SpectralModel, Spectrum, SpectrumMeta};
pub use tc::TcInstance;
