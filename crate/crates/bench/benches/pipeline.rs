use std::hint::black_box;

use cqed_spectrokit::constants::to_angular;
use cqed_spectrokit::dataio::{
    generate_map, parse_map_csv, symmetric_grid, write_map_csv, CouplingMode,
};
use cqed_spectrokit::fit::{
    extract_branch_peaks, fit_anticrossing, fit_lorentzian, ExtractOptions,
};
use cqed_spectrokit::spectral::{linear_grid, spectrum_from_model};
use cqed_spectrokit::tc::{effective_coupling, TcInstance};
use cqed_spectrokit::{
    CoupledSystem, FieldPoint, LmOptions, PhysicalConstants, ResonatorParams, SpinSpecies,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const C: PhysicalConstants = PhysicalConstants::CODATA2018;

fn system() -> CoupledSystem {
    CoupledSystem::new(
        ResonatorParams::bare(7.7522e9, 16000.0, 33.5).unwrap(),
        to_angular(134e6),
        0.0,
        FieldPoint::new(0.276, 0.276).unwrap(),
        SpinSpecies::dpph(),
    )
    .unwrap()
}

fn lorentzian(c: &mut Criterion) {
    let truth = ResonatorParams::bare(7.7553e9, 20000.0, 16.5).unwrap();
    let grid = linear_grid(7.7522e9, 7.7584e9, 2001).unwrap();
    let spec = spectrum_from_model(&truth.into(), &grid, 0.1, 1, &C).unwrap();
    c.bench_function("fit_lorentzian/2001pts", |b| {
        b.iter(|| fit_lorentzian(black_box(&spec), None, &LmOptions::default()).unwrap())
    });
}

fn anticrossing(c: &mut Criterion) {
    let fields = symmetric_grid(0.276, 15e-3, 0.5e-3).unwrap();
    let freqs = symmetric_grid(7.7522e9, 150e6, 100e3).unwrap();
    let map = generate_map(
        &system(),
        CouplingMode::Thermal,
        &fields,
        &freqs,
        2.0,
        0.1,
        3,
        &C,
    )
    .unwrap();
    let mut g = c.benchmark_group("anticrossing");
    g.sample_size(20);
    g.bench_function("generate_map", |b| {
        b.iter(|| {
            generate_map(
                &system(),
                CouplingMode::Thermal,
                &fields,
                &freqs,
                2.0,
                0.1,
                3,
                &C,
            )
            .unwrap()
        })
    });
    g.bench_function("extract_and_fit", |b| {
        b.iter(|| {
            let data = extract_branch_peaks(black_box(&map), &ExtractOptions::default())
                .unwrap()
                .into_data()
                .unwrap();
            fit_anticrossing(&data, &SpinSpecies::dpph(), None, &C, &LmOptions::default()).unwrap()
        })
    });
    let csv = write_map_csv(&map);
    g.bench_function("parse_map_csv", |b| {
        b.iter(|| parse_map_csv(black_box(csv.as_bytes())).unwrap())
    });
    g.finish();
}

fn tavis_cummings(c: &mut Criterion) {
    let w = to_angular(7.7522e9);
    let mut g = c.benchmark_group("effective_coupling");
    for n in [100, 10_000, 1_000_000] {
        let inst = TcInstance::uniform(w, n, to_angular(39e6) / (n as f64).sqrt(), 0.0).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| effective_coupling(black_box(inst)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lorentzian, anticrossing, tavis_cummings);
criterion_main!(benches);
