mod args;
mod units;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use cqed_spectrokit::constants::{to_angular, to_hz};
use cqed_spectrokit::dataio::{
    generate_map, parse_gc_points_csv, parse_map_csv, parse_sweep_csv, parse_touchstone,
    symmetric_grid, write_map_csv, write_result_json, write_sweep_csv, CouplingMode, JsonDoc,
    ToResultJson,
};
use cqed_spectrokit::ensemble::{polarized_fraction, radical_count};
use cqed_spectrokit::estimators::{
    incident_power_dbm, photon_number, photons_vs_polarized_advisory, vacuum_field_at,
};
use cqed_spectrokit::fit::{
    extract_branch_peaks, fit_anticrossing, fit_lorentzian, fit_temperature_scaling, initial_guess,
    ExtractOptions, LorentzianFit,
};
use cqed_spectrokit::spectral::{linear_grid, spectrum_from_model};
use cqed_spectrokit::tc::{compare_with_branch_formula, TcInstance};
use cqed_spectrokit::{
    CoupledSystem, Error, FieldPoint, LmOptions, PhysicalConstants, ResonatorParams, Spectrum,
    SpinSpecies,
};

use args::{Cli, Command, Estimate, Fit, Simulate};

const C: PhysicalConstants = PhysicalConstants::CODATA2018;

#[derive(Debug)]
enum Failure {
    /// Rejected input or parameters.
    Domain {
        error: Error,
        path: Option<PathBuf>,
    },
    Io {
        path: PathBuf,
        error: std::io::Error,
    },
    Usage(String),
    /// Already reported (batch runs).
    Reported,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure::Domain { error, path: None }
    }
}

impl Failure {
    fn at(self, path: &Path) -> Self {
        match self {
            Failure::Domain { error, path: None } => Failure::Domain {
                error,
                path: Some(path.to_path_buf()),
            },
            other => other,
        }
    }

    fn report(&self) -> u8 {
        let line = match self {
            Failure::Usage(msg) => {
                eprintln!("error: {msg}");
                return 2;
            }
            Failure::Reported => return 1,
            Failure::Domain { error, path } => {
                let mut v =
                    serde_json::json!({ "error": error.kind(), "message": error.to_string() });
                if let Error::Parse(p) = error {
                    if let Some(line) = p.line() {
                        v["line"] = line.into();
                    }
                }
                if let Some(p) = path {
                    v["path"] = p.display().to_string().into();
                }
                v
            }
            Failure::Io { path, error } => serde_json::json!({
                "error": "Io",
                "message": error.to_string(),
                "path": path.display().to_string(),
            }),
        };
        eprintln!("{line}");
        1
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => ExitCode::from(f.report()),
    }
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Simulate(s) => simulate(s),
        Command::Fit(f) => fit(f, cli.verbose),
        Command::Estimate(e) => estimate(e),
        Command::Convert { input, output } => {
            require_file(input)?;
            let spec = parse_touchstone(&read(input)?).map_err(|e| Failure::from(e).at(input))?;
            write_to(Some(output), &write_sweep_csv(&spec))
        }
    }
}

fn require_file(path: &Path) -> Outcome {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "input file `{}` does not exist",
            path.display()
        )))
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|error| Failure::Io {
        path: path.to_path_buf(),
        error,
    })
}

fn write_to(path: Option<&PathBuf>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|error| Failure::Io {
            path: p.clone(),
            error,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|error| Failure::Io {
                    path: "<stdout>".into(),
                    error,
                })
        }
    }
}

fn simulate(cmd: &Simulate) -> Outcome {
    match cmd {
        Simulate::Lorentzian {
            f0,
            q,
            il,
            grid_start,
            grid_stop,
            points,
            noise,
            seed,
            output,
        } => {
            let res = ResonatorParams::bare(*f0, *q, *il)?;
            let grid = linear_grid(*grid_start, *grid_stop, *points)?;
            let spec = spectrum_from_model(&res.into(), &grid, *noise, seed.seed, &C)?;
            write_to(output.out.as_ref(), &write_sweep_csv(&spec))
        }
        Simulate::Anticrossing {
            f0,
            q,
            il,
            gc_prefactor_mhz,
            temp_k,
            bres_t,
            field_span,
            field_step,
            freq_span,
            freq_step,
            noise,
            seed,
            output,
        } => {
            let base = CoupledSystem::new(
                ResonatorParams::bare(*f0, *q, *il)?,
                to_angular(gc_prefactor_mhz * 1e6),
                0.0,
                FieldPoint::new(*bres_t, *bres_t)?,
                SpinSpecies::dpph(),
            )?;
            let fields = symmetric_grid(*bres_t, field_span / 2.0, *field_step)?;
            let freqs = symmetric_grid(*f0, freq_span / 2.0, *freq_step)?;
            let map = generate_map(
                &base,
                CouplingMode::Thermal,
                &fields,
                &freqs,
                *temp_k,
                *noise,
                seed.seed,
                &C,
            )?;
            write_to(output.out.as_ref(), &write_map_csv(&map))
        }
        Simulate::Tc {
            n,
            g_hz,
            detuning_sweep,
            f0,
            output,
        } => {
            let w0 = to_angular(*f0);
            let inst = TcInstance::uniform(w0, *n, to_angular(*g_hz), 0.0)?;
            let detunings = detuning_sweep.values();
            let sweep: Vec<f64> = detunings.iter().copied().map(to_angular).collect();
            let rows = compare_with_branch_formula(&inst, &sweep)?;
            let mut text = String::from(
                "detuning_hz,lower_hz,upper_hz,formula_lower_hz,formula_upper_hz,rel_err,dark_states\n",
            );
            for (d, r) in detunings.iter().zip(rows) {
                text.push_str(&format!(
                    "{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
                    d,
                    to_hz(r.oracle.0),
                    to_hz(r.oracle.1),
                    to_hz(r.formula.0),
                    to_hz(r.formula.1),
                    r.rel_err,
                    r.dark_count
                ));
            }
            write_to(output.out.as_ref(), &text)
        }
    }
}

fn load_sweep(path: &Path) -> Result<Spectrum, Failure> {
    let bytes = read(path)?;
    let is_touchstone = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("s2p"));
    let parsed = if is_touchstone {
        parse_touchstone(&bytes)
    } else {
        parse_sweep_csv(&bytes)
    };
    parsed.map_err(|e| Failure::from(e).at(path))
}

/// Best of `starts` fits by residual; start `k > 0` scales the automatic Q
/// guess by `2^(+-ceil(k/2))`.
fn fit_resonance(spec: &Spectrum, starts: usize) -> Result<LorentzianFit, Error> {
    let opts = LmOptions::default();
    let mut best = fit_lorentzian(spec, None, &opts);
    if starts > 1 {
        let [f0, q, il] = initial_guess(spec)?;
        for k in 1..starts {
            let power = k.div_ceil(2) as i32 * if k % 2 == 1 { 1 } else { -1 };
            let Ok(init) = ResonatorParams::bare(f0, q * 2f64.powi(power), il) else {
                continue;
            };
            if let Ok(candidate) = fit_lorentzian(spec, Some(&init), &opts) {
                let better = match &best {
                    Ok(b) => candidate.fit.residual_rms < b.fit.residual_rms,
                    Err(_) => true,
                };
                if better {
                    best = Ok(candidate);
                }
            }
        }
    }
    best
}

fn fit(cmd: &Fit, verbose: u8) -> Outcome {
    match cmd {
        Fit::Resonance {
            inputs,
            glob,
            out_dir,
            starts,
        } => {
            if *starts == 0 {
                return Err(Failure::Usage("--starts must be at least 1".into()));
            }
            let mut files = inputs.clone();
            if let Some(pattern) = glob {
                let paths = glob::glob(pattern)
                    .map_err(|e| Failure::Usage(format!("bad --glob pattern: {e}")))?;
                let mut matched: Vec<PathBuf> = paths
                    .filter_map(|p| p.ok())
                    .filter(|p| p.is_file())
                    .collect();
                matched.sort();
                files.extend(matched);
            }
            if files.is_empty() {
                return Err(Failure::Usage("no input files".into()));
            }
            for f in &files {
                require_file(f)?;
            }
            if let Some(dir) = out_dir {
                if !dir.is_dir() {
                    return Err(Failure::Usage(format!(
                        "output directory `{}` does not exist",
                        dir.display()
                    )));
                }
            }
            let batch = files.len() > 1;
            let mut failed = false;
            for path in &files {
                let result = load_sweep(path).and_then(|spec| {
                    fit_resonance(&spec, *starts).map_err(|e| Failure::from(e).at(path))
                });
                let text = match result {
                    Ok(fit) => {
                        if verbose > 0 {
                            eprintln!(
                                "{}: {} iterations, rms {:.3e} dB",
                                path.display(),
                                fit.fit.iterations,
                                fit.fit.residual_rms
                            );
                        }
                        let mut doc = fit.to_json();
                        if batch {
                            doc.str("input", &path.display().to_string());
                        }
                        doc.render()
                    }
                    Err(f) => {
                        f.report();
                        failed = true;
                        continue;
                    }
                };
                let dest = out_dir.as_ref().map(|d| {
                    let stem = path
                        .file_stem()
                        .map_or("result".into(), |s| s.to_string_lossy().into_owned());
                    d.join(format!("{stem}.json"))
                });
                write_to(dest.as_ref(), &text)?;
            }
            if failed {
                Err(Failure::Reported)
            } else {
                Ok(())
            }
        }
        Fit::Anticrossing {
            input,
            f0_fixed,
            min_prominence_db,
            f0_ref,
            g_factor,
            output,
        } => {
            require_file(input)?;
            let species = SpinSpecies::dpph().with_g_factor(*g_factor)?;
            let map = parse_map_csv(&read(input)?).map_err(|e| Failure::from(e).at(input))?;
            let opts = ExtractOptions {
                min_prominence_db: *min_prominence_db,
                f0_ref: *f0_ref,
                ..ExtractOptions::default()
            };
            let extraction = extract_branch_peaks(&map, &opts)?;
            if verbose > 0 {
                for s in &extraction.skipped {
                    eprintln!("row {} (B = {} T): {}", s.row, s.field, s.reason);
                }
            }
            let skipped = extraction.skipped.len();
            let used = map.n_rows() - skipped;
            let fitted = fit_anticrossing(
                &extraction.into_data()?,
                &species,
                *f0_fixed,
                &C,
                &LmOptions::default(),
            )?;
            let mut doc = fitted.to_json();
            doc.int("rows_used", used as i64)
                .int("rows_skipped", skipped as i64);
            write_to(output.out.as_ref(), &doc.render())
        }
        Fit::GcTemperature {
            input,
            f0,
            n_total,
            output,
        } => {
            require_file(input)?;
            let points =
                parse_gc_points_csv(&read(input)?).map_err(|e| Failure::from(e).at(input))?;
            let points: Vec<(f64, f64)> = points
                .into_iter()
                .map(|(t, g)| (t, to_angular(g)))
                .collect();
            let fitted = fit_temperature_scaling(&points, *f0, *n_total, &C)?;
            write_to(output.out.as_ref(), &write_result_json(&fitted))
        }
    }
}

fn positive(value: f64, name: &'static str, expected: &'static str) -> Result<(), Error> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}

fn estimate(cmd: &Estimate) -> Outcome {
    match cmd {
        Estimate::Photons {
            f0,
            q,
            il,
            pinc_dbm,
            coax_il_db,
            n_polarized,
            output,
        } => {
            let res = ResonatorParams::bare(*f0, *q, *il)?;
            let p_inc = match coax_il_db {
                Some(loss) => incident_power_dbm(*pinc_dbm, *loss),
                None => *pinc_dbm,
            };
            let est = photon_number(&res, p_inc, &C);
            let mut doc = est.to_json();
            doc.num("p_inc_dbm", p_inc);
            if let Some(np) = n_polarized {
                let adv = photons_vs_polarized_advisory(est.n_ph, *np)?;
                doc.num("photon_spin_ratio", adv.ratio)
                    .bool("low_excitation", adv.low_excitation);
            }
            write_to(output.out.as_ref(), &doc.render())
        }
        Estimate::Gs {
            f0,
            z0,
            w_eff,
            g_factor,
            output,
        } => {
            positive(*f0, "f0", "f0 > 0 Hz")?;
            positive(*z0, "z0", "z0 > 0 ohm")?;
            positive(*w_eff, "w_eff", "w_eff > 0 m")?;
            let species = SpinSpecies::dpph().with_g_factor(*g_factor)?;
            let est = vacuum_field_at(*f0, *z0, *w_eff, species.g_factor(), &C);
            write_to(output.out.as_ref(), &write_result_json(&est))
        }
        Estimate::Spins {
            volume_mm3,
            density,
            molar_mass,
            temp_k,
            f0,
            output,
        } => {
            let species = SpinSpecies::dpph().with_mass(*molar_mass, *density)?;
            let n = radical_count(volume_mm3 * 1e-9, &species, &C)?;
            let mut doc = JsonDoc::new("spins");
            doc.num("n_total", n);
            if let (Some(t), Some(f)) = (temp_k, f0) {
                doc.num("n_polarized", n * polarized_fraction(*f, *t, &C)?);
            }
            write_to(output.out.as_ref(), &doc.render())
        }
    }
}
