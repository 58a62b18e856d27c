use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::units::{parse_finite, parse_freq, parse_sweep, Sweep};

const FREQ_HELP: &str = "Frequencies take a plain number in Hz or a suffixed value: <float><hz|khz|mhz|ghz>, e.g. 7.7553ghz, 39mhz.";

/// Forward models, fits and estimators for resonator-spin ensemble
/// transmission spectroscopy.
///
/// Results go to stdout (or --out), diagnostics to stderr. Exit status is 0 on
/// success, 1 when the input or parameters are rejected (one JSON line on
/// stderr), 2 on usage errors.
#[derive(Debug, Parser)]
#[command(name = "cqed-spectrokit", version, after_help = FREQ_HELP)]
pub struct Cli {
    /// Print diagnostics to stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic data.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Fit models to measured or synthetic data.
    #[command(subcommand)]
    Fit(Fit),
    /// Closed-form experimental estimates.
    #[command(subcommand)]
    Estimate(Estimate),
    /// Convert a two-port Touchstone file to a `freq_hz,s21_db` sweep CSV.
    #[command(after_help = FREQ_HELP)]
    Convert {
        /// Input Touchstone (.s2p) file.
        input: PathBuf,
        /// Output CSV path.
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the result here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Seed {
    /// Noise seed; defaults to $CQED_SEED, then 0.
    #[arg(long, env = "CQED_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Simulate {
    /// Bare-resonator sweep as `freq_hz,s21_db` CSV.
    #[command(after_help = FREQ_HELP)]
    Lorentzian {
        /// Resonance frequency, Hz.
        #[arg(long, value_parser = parse_freq)]
        f0: f64,
        /// Loaded quality factor (dimensionless).
        #[arg(long, value_parser = parse_finite)]
        q: f64,
        /// Insertion loss at resonance, dB (positive).
        #[arg(long, value_parser = parse_finite)]
        il: f64,
        /// First grid frequency, Hz.
        #[arg(long, value_parser = parse_freq)]
        grid_start: f64,
        /// Last grid frequency, Hz.
        #[arg(long, value_parser = parse_freq)]
        grid_stop: f64,
        /// Number of grid points (count).
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Gaussian noise standard deviation, dB.
        #[arg(long, default_value_t = 0.0, value_parser = parse_finite)]
        noise: f64,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        output: Output,
    },
    /// Field-swept transmission map as `b_tesla,freq_hz,s21_db` CSV, with the
    /// coupling and spin linewidth set by the sample temperature.
    #[command(after_help = FREQ_HELP)]
    Anticrossing {
        /// Bare cavity frequency, Hz.
        #[arg(long, value_parser = parse_freq, default_value = "7.7522ghz")]
        f0: f64,
        /// Loaded quality factor (dimensionless).
        #[arg(long, value_parser = parse_finite, default_value_t = 16000.0)]
        q: f64,
        /// Insertion loss at resonance, dB (positive).
        #[arg(long, value_parser = parse_finite, default_value_t = 33.5)]
        il: f64,
        /// Collective-coupling prefactor over 2 pi, MHz (plain number).
        #[arg(long, value_parser = parse_finite, default_value_t = 134.0)]
        gc_prefactor_mhz: f64,
        /// Sample temperature, K.
        #[arg(long, value_parser = parse_finite, default_value_t = 2.0)]
        temp_k: f64,
        /// Resonance field, T.
        #[arg(long, value_parser = parse_finite, default_value_t = 0.276)]
        bres_t: f64,
        /// Full width of the field window centred on --bres-t, T.
        #[arg(long, value_parser = parse_finite, default_value_t = 0.03)]
        field_span: f64,
        /// Field step, T.
        #[arg(long, value_parser = parse_finite, default_value_t = 0.2e-3)]
        field_step: f64,
        /// Full width of the frequency window centred on --f0, Hz.
        #[arg(long, value_parser = parse_freq, default_value = "300mhz")]
        freq_span: f64,
        /// Frequency step, Hz.
        #[arg(long, value_parser = parse_freq, default_value = "50khz")]
        freq_step: f64,
        /// Gaussian noise standard deviation, dB.
        #[arg(long, default_value_t = 0.0, value_parser = parse_finite)]
        noise: f64,
        #[command(flatten)]
        seed: Seed,
        #[command(flatten)]
        output: Output,
    },
    /// Exact single-excitation spectrum of N identical spins versus detuning,
    /// next to the two-branch formula, as CSV (all columns Hz).
    #[command(after_help = FREQ_HELP)]
    Tc {
        /// Number of spins (count).
        #[arg(long)]
        n: usize,
        /// Single-spin coupling over 2 pi, Hz.
        #[arg(long, value_parser = parse_freq)]
        g_hz: f64,
        /// Spin detuning sweep START:STOP:POINTS; endpoints in Hz.
        #[arg(long, value_parser = parse_sweep, default_value = "-200mhz:200mhz:41", allow_hyphen_values = true)]
        detuning_sweep: Sweep,
        /// Cavity frequency, Hz.
        #[arg(long, value_parser = parse_freq, default_value = "7.7522ghz")]
        f0: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum Fit {
    /// Fit a bare-resonator lineshape to sweeps (.csv or .s2p). Emits JSON with
    /// f0_hz (Hz), q_loaded and il_db (dB).
    #[command(after_help = FREQ_HELP)]
    Resonance {
        /// Sweep files: `freq_hz,s21_db` CSV or Touchstone .s2p.
        inputs: Vec<PathBuf>,
        /// Also fit every file matching this pattern.
        #[arg(long, value_name = "PATTERN")]
        glob: Option<String>,
        /// Write one `<stem>.json` per input into this directory.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Number of starting points; extra starts rescale the automatic Q
        /// guess by factors of 2.
        #[arg(long, default_value_t = 1)]
        starts: usize,
    },
    /// Extract branch peaks from a field map CSV and fit the two-branch
    /// formula. Emits JSON with gc_hz (Hz), bres_t (T) and f0_hz (Hz).
    #[command(after_help = FREQ_HELP)]
    Anticrossing {
        /// Map CSV with columns `b_tesla,freq_hz,s21_db`.
        input: PathBuf,
        /// Hold the cavity frequency at this value, Hz.
        #[arg(long, value_parser = parse_freq)]
        f0_fixed: Option<f64>,
        /// Minimum peak prominence, dB.
        #[arg(long, value_parser = parse_finite, default_value_t = 3.0)]
        min_prominence_db: f64,
        /// Cavity frequency used to label single peaks, Hz; estimated from the
        /// outer rows when absent.
        #[arg(long, value_parser = parse_freq)]
        f0_ref: Option<f64>,
        /// Electron g-factor (dimensionless).
        #[arg(long, value_parser = parse_finite, default_value_t = 2.0037)]
        g_factor: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Fit g_c = prefactor * sqrt(tanh(h f / 2 k T)) to `temperature_k,gc_hz`
    /// points. Emits JSON with prefactor_hz (Hz) and, with --n-total,
    /// g_single_hz (Hz).
    #[command(after_help = FREQ_HELP)]
    GcTemperature {
        /// CSV with columns `temperature_k` (K) and `gc_hz` (Hz, coupling over 2 pi).
        input: PathBuf,
        /// Spin transition frequency, Hz.
        #[arg(long, value_parser = parse_freq)]
        f0: f64,
        /// Total number of spins (count), for the single-spin coupling.
        #[arg(long, value_parser = parse_finite)]
        n_total: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Subcommand)]
pub enum Estimate {
    /// Circulating power (W) and intracavity photon number.
    #[command(after_help = FREQ_HELP)]
    Photons {
        /// Resonance frequency, Hz.
        #[arg(long, value_parser = parse_freq)]
        f0: f64,
        /// Loaded quality factor (dimensionless).
        #[arg(long, value_parser = parse_finite)]
        q: f64,
        /// Insertion loss at resonance, dB (positive).
        #[arg(long, value_parser = parse_finite)]
        il: f64,
        /// Incident power, dBm. With --coax-il-db this is the analyzer output.
        #[arg(long, value_parser = parse_finite, allow_negative_numbers = true)]
        pinc_dbm: f64,
        /// Round-trip coaxial loss, dB; half of it is taken off --pinc-dbm.
        #[arg(long, value_parser = parse_finite)]
        coax_il_db: Option<f64>,
        /// Polarized spins (count); adds the photon/spin ratio advisory.
        #[arg(long, value_parser = parse_finite)]
        n_polarized: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Vacuum current (A), field (T) and single-spin coupling (Hz).
    #[command(after_help = FREQ_HELP)]
    Gs {
        /// Resonance frequency, Hz.
        #[arg(long, value_parser = parse_freq)]
        f0: f64,
        /// Line impedance, ohm.
        #[arg(long, value_parser = parse_finite, default_value_t = 50.0)]
        z0: f64,
        /// Effective conductor width, m.
        #[arg(long, value_parser = parse_finite, default_value_t = 400e-6)]
        w_eff: f64,
        /// Electron g-factor (dimensionless).
        #[arg(long, value_parser = parse_finite, default_value_t = 2.0037)]
        g_factor: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Number of radicals in a sample volume.
    Spins {
        /// Sample volume, mm^3.
        #[arg(long, value_parser = parse_finite)]
        volume_mm3: f64,
        /// Mass density, g/cm^3.
        #[arg(long, value_parser = parse_finite, default_value_t = 1.4)]
        density: f64,
        /// Molar mass, g/mol.
        #[arg(long, value_parser = parse_finite, default_value_t = 394.32)]
        molar_mass: f64,
        /// Temperature, K; with --f0 adds the polarized count.
        #[arg(long, value_parser = parse_finite, requires = "f0")]
        temp_k: Option<f64>,
        /// Spin transition frequency, Hz.
        #[arg(long, value_parser = parse_freq, requires = "temp_k")]
        f0: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}
