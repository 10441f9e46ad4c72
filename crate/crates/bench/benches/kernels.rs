use criterion::{criterion_group, criterion_main, Criterion};
use geotool_core::initial_data::{dominant_energy_report, InitialDataSet};
use geotool_core::jang::{solve_jang, JangDomain, JangOptions};
use geotool_core::mass::{evaluate_surface, schwarzschild, schwarzschild_profile};
use geotool_core::spin::{revolution_dirac_spectrum, RevolutionDiracProblem, Spheroid};
use geotool_core::surface::families::coordinate_sphere;
use geotool_core::surface::{EuclideanImmersion, Vec3};
use geotool_core::tensor::ChartDomain;
use std::hint::black_box;
use std::sync::Arc;

fn cube(half: f64, n: usize) -> ChartDomain<3> {
    ChartDomain::closed([-half; 3], [half; 3], [n; 3]).unwrap()
}

fn constraints(c: &mut Criterion) {
    let ids = InitialDataSet::schwarzschild(1.0, cube(4.0, 16));
    c.bench_function("dec_report_schwarzschild_16^3", |b| b.iter(|| dominant_energy_report(black_box(&ids)).unwrap()));
}

fn masses(c: &mut Criterion) {
    let ids = InitialDataSet::schwarzschild(1.0, cube(6.0, 3));
    let s = coordinate_sphere(Vec3::zeros(), 3.0, 65, 64).unwrap();
    let e = EuclideanImmersion::round_sphere(&s.domain, schwarzschild::areal_radius(1.0, 3.0));
    c.bench_function("evaluate_surface_64", |b| b.iter(|| evaluate_surface(&ids, black_box(&s), &e).unwrap()));
    let mut g = c.benchmark_group("profile");
    g.sample_size(10);
    g.bench_function("schwarzschild_profile_256", |b| b.iter(|| schwarzschild_profile(1.0, black_box(&[5.0]), 256).unwrap()));
    g.finish();
}

fn jang(c: &mut Criterion) {
    let ids = InitialDataSet::constant_trace(0.3, cube(2.0, 3));
    let d = JangDomain::ball([0.0; 3], 0.2, 1.0, 9, 8, 16).unwrap();
    let mut g = c.benchmark_group("jang");
    g.sample_size(10);
    g.bench_function("ball_9x8x16_constant_trace", |b| b.iter(|| solve_jang(d.clone(), &ids, &JangOptions::default()).unwrap()));
    g.finish();
}

fn dirac(c: &mut Criterion) {
    let p = RevolutionDiracProblem::new(Arc::new(Spheroid { a: 1.0, c: 0.5 }), 3.5, 400);
    c.bench_function("spheroid_spectrum_400", |b| b.iter(|| revolution_dirac_spectrum(black_box(&p), 4).unwrap()));
}

criterion_group!(benches, constraints, masses, jang, dirac);
criterion_main!(benches);
