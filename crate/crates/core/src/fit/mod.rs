//! Least-squares engine and the resonance, anticrossing and
//! temperature-scaling fit drivers.

mod anticrossing;
pub mod lm;
mod lorentzian;
mod temperature;

pub use anticrossing::{
    extract_branch_peaks, fit_anticrossing, AnticrossingData, AnticrossingFit,
    AnticrossingResiduals, Branch, BranchExtraction, BranchPoint, ExtractOptions, SkippedRow,
};
pub use lm::{
    finite_difference_jacobian, finite_difference_jacobian_with_steps, nlls_minimize, JacobianMode,
    LmOptions, ResidualModel,
};
pub use lorentzian::{fit_lorentzian, initial_guess, LorentzianFit, LorentzianResiduals};
pub use temperature::{fit_temperature_scaling, TemperatureFit, TemperatureResiduals};

/// Outcome of a least-squares fit. Parameters are named and kept in the
/// units that appear in their names (`f0_hz`, `gc_hz`, `bres_t`, ...).
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub names: Vec<String>,
    pub params: Vec<f64>,
    /// One-sigma errors from the residual covariance.
    pub std_errs: Vec<f64>,
    /// Root-mean-square residual.
    pub residual_rms: f64,
    /// Unit of `residual_rms` ("db" or "hz").
    pub residual_unit: &'static str,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.params[i])
    }

    pub fn std_err(&self, name: &str) -> Option<f64> {
        self.index(name).map(|i| self.std_errs[i])
    }
}
