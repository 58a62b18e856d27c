use cqed_spectrokit::constants::{to_angular, to_hz};
use cqed_spectrokit::dataio::{default_field_grid, default_freq_grid, generate_map, CouplingMode};
use cqed_spectrokit::ensemble::{effective_linewidth_at, gc_of_temperature, polarized_fraction};
use cqed_spectrokit::estimators::{incident_power_dbm, photon_number};
use cqed_spectrokit::fit::{
    extract_branch_peaks, fit_anticrossing, fit_temperature_scaling, ExtractOptions,
};
use cqed_spectrokit::{
    CoupledSystem, FieldPoint, LmOptions, PhysicalConstants, ResonatorParams, SpinSpecies,
};

const C: PhysicalConstants = PhysicalConstants::CODATA2018;
const F0: f64 = 7.7522e9;
const BRES: f64 = 0.276;

fn base(g_collective_hz: f64, gamma_hz: f64) -> CoupledSystem {
    CoupledSystem::new(
        ResonatorParams::bare(F0, 16000.0, 33.5).unwrap(),
        to_angular(g_collective_hz),
        to_angular(gamma_hz),
        FieldPoint::new(BRES, BRES).unwrap(),
        SpinSpecies::dpph(),
    )
    .unwrap()
}

/// Map -> branch peaks -> undamped branch fit; returns fitted g_c/2pi, Hz.
fn fitted_gc_hz(
    sys: &CoupledSystem,
    mode: CouplingMode,
    t: f64,
    noise: f64,
    seed: u64,
) -> (f64, f64) {
    let map = generate_map(
        sys,
        mode,
        &default_field_grid(BRES),
        &default_freq_grid(F0),
        t,
        noise,
        seed,
        &C,
    )
    .unwrap();
    let ex = extract_branch_peaks(&map, &ExtractOptions::default()).unwrap();
    let fit = fit_anticrossing(
        &ex.into_data().unwrap(),
        &SpinSpecies::dpph(),
        None,
        &C,
        &LmOptions::default(),
    )
    .unwrap();
    (to_hz(fit.g_collective), fit.b_res)
}

#[test]
fn two_kelvin_map_fits_back() {
    let (gc, bres) = fitted_gc_hz(&base(134e6, 14e6), CouplingMode::Thermal, 2.0, 0.1, 11);
    let truth = to_hz(gc_of_temperature(to_angular(134e6), F0, 2.0, &C).unwrap());
    assert!((truth - 40.8e6).abs() < 0.05e6, "{truth}");
    assert!((gc - 40.8e6).abs() < 1e6, "{gc}");
    assert!((bres - BRES).abs() < 0.2e-3, "{bres}");
}

#[test]
fn splitting_pattern_across_temperatures() {
    // Maps built from the reported on-resonance peak separations.
    let cases = [(2.0, 82e6, 39e6), (5.0, 58e6, 29e6), (10.0, 39e6, 19.5e6)];
    for (t, sep, expect) in cases {
        let sys = base(sep / 2.0, to_hz(effective_linewidth_at(t)));
        let (gc, _) = fitted_gc_hz(&sys, CouplingMode::AsGiven, t, 0.1, 3);
        assert!(
            (gc / expect - 1.0).abs() < 0.10,
            "T = {t}: {gc} vs {expect}"
        );
    }
}

#[test]
fn rescaled_sample_pipeline() {
    // Same single-spin coupling, full and 3/4 spin count.
    let f = 7.755e9;
    let gs = to_angular(0.547);
    let n = 6e16;
    let temps = [2.0, 5.0, 10.0, 20.0, 40.0];
    let points = |n_total: f64| -> Vec<(f64, f64)> {
        temps
            .iter()
            .map(|&t| {
                (
                    t,
                    gs * (n_total * polarized_fraction(f, t, &C).unwrap()).sqrt(),
                )
            })
            .collect()
    };
    let full = fit_temperature_scaling(&points(n), f, Some(n), &C).unwrap();
    let part = fit_temperature_scaling(&points(0.75 * n), f, Some(0.75 * n), &C).unwrap();
    let rescaled = part.prefactor / 0.75f64.sqrt();
    assert!((rescaled / full.prefactor - 1.0).abs() < 1e-8);
    assert!((part.g_single.unwrap() / full.g_single.unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn incident_power_convention_feeds_photon_number() {
    let res = ResonatorParams::bare(F0, 16000.0, 33.5).unwrap();
    let direct = photon_number(&res, -12.5, &C);
    let via_coax = photon_number(&res, incident_power_dbm(-2.5, 20.0), &C);
    assert_eq!(direct, via_coax);
    assert!((1.0e11..2.0e11).contains(&direct.n_ph), "{}", direct.n_ph);
}
