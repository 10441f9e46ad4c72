use geotool_core::initial_data::InitialDataSet;
use geotool_core::mass::*;
use geotool_core::surface::families::*;
use geotool_core::surface::{EuclideanImmersion, SurfaceGeometry, Vec3};
use geotool_core::tensor::{ChartDomain, MetricField};
use geotool_core::GeoError;
use proptest::prelude::*;
use std::f64::consts::PI;

fn chart(half: f64) -> ChartDomain<3> {
    ChartDomain::closed([-half; 3], [half; 3], [3; 3]).unwrap()
}

fn sphere_geo(r: f64, n: usize) -> SurfaceGeometry {
    let s = coordinate_sphere(Vec3::zeros(), r, n + 1, n).unwrap();
    SurfaceGeometry::compute(&s, &MetricField::euclidean(chart(2.0 * r))).unwrap()
}

// composite Simpson over theta of f(theta) sin(theta), times 2 pi
fn sphere_integral_oracle(f: impl Fn(f64) -> f64) -> f64 {
    let n = 20_000;
    let h = PI / n as f64;
    let mut s = 0.0;
    for i in 0..=n {
        let t = i as f64 * h;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(t) * t.sin();
    }
    2.0 * PI * s * h / 3.0
}

fn schwarzschild_eval(m: f64, r: f64, n: usize) -> SurfaceEvaluation {
    let ids = InitialDataSet::schwarzschild(m, chart(2.0 * r));
    let s = coordinate_sphere(Vec3::zeros(), r, n + 1, n).unwrap();
    let e = EuclideanImmersion::round_sphere(&s.domain, schwarzschild::areal_radius(m, r));
    evaluate_surface(&ids, &s, &e).unwrap()
}

#[test]
fn flat_sphere_has_zero_masses_and_margins() {
    let s = coordinate_sphere(Vec3::zeros(), 1.5, 65, 64).unwrap();
    let ev = evaluate_surface(&InitialDataSet::flat(chart(3.0)), &s, &EuclideanImmersion::identity(&s)).unwrap();
    let r = &ev.masses;
    assert_eq!(r.m_by, 0.0);
    assert_eq!(r.m_l, Some(0.0));
    assert_eq!(r.m_hmr, Some(0.0));
    assert!(r.liu_yau_margin.unwrap().abs() < 1e-12 && r.hmr_margin.unwrap().abs() < 1e-12);
}

#[test]
fn brown_york_on_schwarzschild_matches_radial_oracle() {
    let (m, r) = (1.0, 3.0);
    let ev = schwarzschild_eval(m, r, 128);
    let u = 1.0 + m / (2.0 * r);
    let du = -m / (2.0 * r * r);
    let h = (2.0 / r + 4.0 * du / u) / (u * u);
    let h0 = 2.0 / (r * u * u);
    let oracle = sphere_integral_oracle(|_| (h0 - h) * u.powi(4) * r * r) / (8.0 * PI);
    assert!((ev.masses.m_by - oracle).abs() < 1e-6 * oracle, "{} {oracle}", ev.masses.m_by);
    assert!((oracle - schwarzschild::brown_york(m, r)).abs() < 1e-9);
}

#[test]
fn brown_york_linearity() {
    let geo = sphere_geo(1.0, 64);
    let h = vec![2.0; geo.len()];
    let eps = 0.37;
    let h0: Vec<f64> = h.iter().map(|v| v + eps).collect();
    assert!((brown_york(&geo, &h, &h0) - eps / 2.0).abs() < 1e-8);
}

#[test]
fn lam_mass_of_minimal_sphere_is_half_areal_radius() {
    for rho in [0.5, 2.0, 7.0] {
        let geo = sphere_geo(rho, 128);
        let h = vec![0.0; geo.len()];
        let h0 = vec![2.0 / rho; geo.len()];
        let ml = lam_mass(&geo, &h, &h0).unwrap();
        assert!((ml - rho / 2.0).abs() < 1e-8 * rho);
        assert!((ml - (geo.area() / (16.0 * PI)).sqrt()).abs() < 1e-8 * rho);
    }
}

#[test]
fn lam_mass_scaling() {
    // H, H0 -> lambda H, lambda H0 on the sphere of radius 1 / lambda
    let base = {
        let geo = sphere_geo(1.0, 64);
        lam_mass(&geo, &vec![1.0; geo.len()], &vec![2.0; geo.len()]).unwrap()
    };
    for lambda in [0.5, 3.0] {
        let geo = sphere_geo(1.0 / lambda, 64);
        let m = lam_mass(&geo, &vec![lambda; geo.len()], &vec![2.0 * lambda; geo.len()]).unwrap();
        assert!((m - base / lambda).abs() < 1e-10 * base / lambda);
    }
}

#[test]
fn hmr_schwarzschild_profile() {
    let m = 2.0;
    for x in [1.0, 2.0, 5.0, 10.0, 50.0] {
        let ev = schwarzschild_eval(m, x * m, 128);
        let got = ev.masses.m_hmr.unwrap();
        let expect = schwarzschild::hmr(m, x * m);
        assert!((got - expect).abs() <= 1e-6 * expect, "r/M = {x}: {got} vs {expect}");
        assert!((ev.masses.m_by - schwarzschild::brown_york(m, x * m)).abs() <= 1e-6 * expect);
        assert!((ev.masses.m_l.unwrap() - m).abs() <= 1e-6 * m);
    }
}

#[test]
fn profile_decreases_to_the_adm_mass() {
    let m = 1.0;
    let radii: Vec<f64> = (0..12).map(|i| 0.6 * 1.6f64.powi(i)).collect();
    let rows = schwarzschild_profile(m, &radii, 64).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].m_hmr < w[0].m_hmr);
        assert!(w[1].closed_form < w[0].closed_form);
    }
    for r in [100.0, 1000.0] {
        let row = schwarzschild_profile(m, &[r], 64).unwrap()[0];
        assert!((row.m_hmr - m).abs() <= 2.0 * m * m / r);
    }
    assert!(matches!(schwarzschild_profile(m, &[0.4], 16), Err(GeoError::Infeasible(_))));
}

#[test]
fn denominators_must_be_positive() {
    let geo = sphere_geo(1.0, 16);
    let pos = vec![2.0; geo.len()];
    let mut bad = pos.clone();
    bad[40] = -1e-3;
    assert!(matches!(lam_mass(&geo, &pos, &bad), Err(GeoError::NonPositive { .. })));
    assert!(matches!(hmr_mass(&geo, &bad, &pos), Err(GeoError::NonPositive { .. })));
}

#[test]
fn liu_yau_margins_on_schwarzschild_and_constant_trace_spheres() {
    let ev = schwarzschild_eval(1.0, 2.0, 64);
    assert!(ev.masses.liu_yau_margin.unwrap() > 0.0 && ev.masses.hmr_margin.unwrap() > 0.0);
    for (r, c) in [(1.0, 0.3), (2.0, -0.45), (0.5, 1.9)] {
        let s = coordinate_sphere(Vec3::zeros(), r, 129, 128).unwrap();
        let ev = evaluate_surface(&InitialDataSet::constant_trace(c, chart(2.0 * r)), &s, &EuclideanImmersion::identity(&s)).unwrap();
        let norm = (4.0 / (r * r) - 4.0 * c * c).sqrt();
        let area = 4.0 * PI * r * r;
        let classic = area * (2.0 / r - norm);
        let hmr = area * (4.0 / (r * r) / norm - norm);
        let margins = liu_yau_checks(&ev.geometry, &ev.expansions, &ev.comparison.h0).unwrap();
        assert!((margins.classic_margin - classic).abs() < 1e-6 * classic.abs().max(area), "{} {classic}", margins.classic_margin);
        assert!((margins.hmr_margin - hmr).abs() < 1e-6 * hmr.abs().max(area), "{} {hmr}", margins.hmr_margin);
        assert!(hmr > 0.0 && margins.implication_holds);
    }
}

#[test]
fn trapped_sphere_has_no_liu_yau_margin() {
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 17, 16).unwrap();
    let ev = evaluate_surface(&InitialDataSet::constant_trace(-2.0, chart(2.0)), &s, &EuclideanImmersion::identity(&s)).unwrap();
    assert!(matches!(
        liu_yau_checks(&ev.geometry, &ev.expansions, &ev.comparison.h0),
        Err(GeoError::ZeroNormMeanCurvature { .. })
    ));
    assert!(ev.masses.liu_yau_margin.is_none());
}

proptest! {
    #[test]
    fn cauchy_schwarz_chain(
        h in proptest::collection::vec(0.1f64..5.0, 17 * 16),
        h0 in proptest::collection::vec(0.1f64..5.0, 17 * 16),
    ) {
        let geo = sphere_geo(1.0, 16);
        let (hmr, by, l) = (hmr_mass(&geo, &h, &h0).unwrap(), brown_york(&geo, &h, &h0), lam_mass(&geo, &h, &h0).unwrap());
        let tol = 1e-12 * geo.area() * 25.0;
        prop_assert!(hmr >= by - tol && by >= l - tol, "{} {} {}", hmr, by, l);
    }

    #[test]
    fn classic_margin_controls_hmr_margin(
        norm in proptest::collection::vec(0.1f64..5.0, 17 * 16),
        h0 in proptest::collection::vec(0.1f64..5.0, 17 * 16),
        tr in proptest::collection::vec(-1.0f64..1.0, 17 * 16),
    ) {
        let geo = sphere_geo(1.0, 16);
        // H chosen so that |H|^2 = H^2 - tr^2 = norm^2
        let h: Vec<f64> = norm.iter().zip(&tr).map(|(n, t)| (n * n + t * t).sqrt()).collect();
        let n = geotool_core::surface::null_expansions(&geo, &h, &tr);
        let m = liu_yau_checks(&geo, &n, &h0).unwrap();
        prop_assert!(m.hmr_margin >= 2.0 * m.classic_margin - 1e-10 * geo.area());
        prop_assert!(m.implication_holds);
    }

    #[test]
    fn near_equality_gives_small_masses(eps in 0.0f64..1e-6, seed in 0usize..100) {
        let geo = sphere_geo(1.3, 16);
        let h: Vec<f64> = (0..geo.len()).map(|k| 1.0 + 0.5 * ((k + seed) as f64).sin()).collect();
        let h0: Vec<f64> = h.iter().enumerate().map(|(k, v)| v + eps * (k as f64).cos()).collect();
        let bound = eps * geo.area();
        prop_assert!(brown_york(&geo, &h, &h0).abs() <= bound);
        prop_assert!(lam_mass(&geo, &h, &h0).unwrap().abs() <= bound);
        prop_assert!(hmr_mass(&geo, &h, &h0).unwrap().abs() <= bound);
    }
}
