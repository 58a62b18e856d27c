//! Single-excitation Tavis-Cummings spectra.
//!
//! With one excitation shared between the cavity and N two-level spins the
//! Hamiltonian (in units of hbar) is an (N+1)x(N+1) arrow matrix: the cavity
//! frequency at the apex, the spin frequencies on the diagonal and the
//! single-spin couplings on the arms. It is used here as a brute-force check
//! of the `g sqrt(N)` collective-coupling law and of the two-mode branch
//! formula.

mod arrow;

pub use arrow::arrow_eigenvalues;

use crate::error::{check, Error, Result};
use crate::spectral::rabi_branches_at;

/// Relative tolerance for the resonance check in [`effective_coupling`].
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TcInstance {
    omega_cavity: f64,
    spin_freqs: Vec<f64>,
    couplings: Vec<f64>,
}

impl TcInstance {
    /// All angular frequencies in rad/s.
    pub fn new(omega_cavity: f64, spin_freqs: Vec<f64>, couplings: Vec<f64>) -> Result<Self> {
        check(
            omega_cavity.is_finite(),
            "omega_cavity",
            omega_cavity,
            "finite rad/s",
        )?;
        if spin_freqs.len() != couplings.len() {
            return Err(Error::InvalidParameter {
                name: "couplings",
                value: couplings.len() as f64,
                expected: "one coupling per spin",
            });
        }
        if spin_freqs.is_empty() {
            return Err(Error::InsufficientData {
                needed: 1,
                found: 0,
            });
        }
        for &w in &spin_freqs {
            check(w.is_finite(), "spin_freq", w, "finite rad/s")?;
        }
        for &g in &couplings {
            check(g >= 0.0, "coupling", g, "coupling >= 0 rad/s")?;
        }
        Ok(Self {
            omega_cavity,
            spin_freqs,
            couplings,
        })
    }

    /// `n` identical spins detuned by `delta` from the cavity, each coupled
    /// with `g`.
    pub fn uniform(omega_cavity: f64, n: usize, g: f64, delta: f64) -> Result<Self> {
        Self::new(omega_cavity, vec![omega_cavity + delta; n], vec![g; n])
    }

    pub fn omega_cavity(&self) -> f64 {
        self.omega_cavity
    }

    pub fn spin_freqs(&self) -> &[f64] {
        &self.spin_freqs
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn n_spins(&self) -> usize {
        self.spin_freqs.len()
    }
}

/// Sorted single-excitation eigenfrequencies (N+1 values), rad/s.
pub fn single_excitation_spectrum(inst: &TcInstance) -> Vec<f64> {
    arrow_eigenvalues(inst.omega_cavity, &inst.spin_freqs, &inst.couplings)
}

fn check_resonant(inst: &TcInstance, omega_spin: f64) -> Result<()> {
    let tol = RESONANCE_TOLERANCE * omega_spin.abs().max(f64::MIN_POSITIVE);
    for (index, &w) in inst.spin_freqs.iter().enumerate() {
        if (w - omega_spin).abs() > tol {
            return Err(Error::NotResonant { index, omega: w });
        }
    }
    Ok(())
}

/// Half the distance between the extremal eigenvalues of a resonant
/// instance, rad/s. Analytically `sqrt(sum g_i^2)`.
pub fn effective_coupling(inst: &TcInstance) -> Result<f64> {
    check_resonant(inst, inst.omega_cavity)?;
    let spec = single_excitation_spectrum(inst);
    Ok(0.5 * (spec[spec.len() - 1] - spec[0]))
}

/// Oracle against two-mode branch formula at one detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchComparison {
    /// Spin detuning from the cavity, rad/s.
    pub delta: f64,
    /// Extremal (bright) oracle eigenvalues, rad/s.
    pub oracle: (f64, f64),
    /// Branch formula with `g_c = g sqrt(N)`, rad/s.
    pub formula: (f64, f64),
    /// Largest relative deviation of the two branch positions.
    pub rel_err: f64,
    /// Relative deviation of the branch separation.
    pub split_rel_err: f64,
    /// Eigenvalues sitting exactly at the spin frequency.
    pub dark_count: usize,
}

/// Diagonalize the uniform instance at each detuning in `sweep` (rad/s,
/// spins placed at `omega_cavity + delta`) and compare its bright states
/// with the branch formula.
pub fn compare_with_branch_formula(
    inst: &TcInstance,
    sweep: &[f64],
) -> Result<Vec<BranchComparison>> {
    let g = inst.couplings[0];
    if inst.couplings.iter().any(|&c| c != g) {
        return Err(Error::NonUniformCoupling);
    }
    check_resonant(inst, inst.spin_freqs[0])?;
    let n = inst.n_spins();
    let g_c = g * (n as f64).sqrt();
    let w0 = inst.omega_cavity;
    sweep
        .iter()
        .map(|&delta| {
            let point = TcInstance::uniform(w0, n, g, delta)?;
            let omega_spin = point.spin_freqs[0];
            let spec = single_excitation_spectrum(&point);
            let oracle = (spec[0], spec[spec.len() - 1]);
            let formula = rabi_branches_at(w0, delta, g_c);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
            let dark_count = spec[1..spec.len() - 1]
                .iter()
                .filter(|&&w| w == omega_spin)
                .count();
            Ok(BranchComparison {
                delta,
                oracle,
                formula,
                rel_err: rel(oracle.0, formula.0).max(rel(oracle.1, formula.1)),
                split_rel_err: rel(oracle.1 - oracle.0, formula.1 - formula.0),
                dark_count,
            })
        })
        .collect()
}
