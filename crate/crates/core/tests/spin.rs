use geotool_core::mass::schwarzschild;
use geotool_core::spin::*;
use geotool_core::surface::families::{coordinate_sphere, spheroid, torus};
use geotool_core::surface::{SurfaceEmbedding, SurfaceGeometry, Vec3};
use geotool_core::tensor::{ChartDomain, MetricField};
use geotool_core::GeoError;
use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn flat(half: f64) -> MetricField<3> {
    MetricField::euclidean(ChartDomain::closed([-half; 3], [half; 3], [3; 3]).unwrap())
}

fn up() -> Spinor {
    Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
}

fn geometry(s: &SurfaceEmbedding, half: f64) -> SurfaceGeometry {
    SurfaceGeometry::compute(s, &flat(half)).unwrap()
}

fn order(a: f64, b: f64) -> f64 {
    (a / b).log2()
}

#[test]
fn standard_rep_identities_hold_to_roundoff() {
    let r = clifford_identities(&CliffordRep::standard(), 100, 7);
    assert!(r.pass, "{:?}", r.checks);
    assert_eq!(r.checks.len(), 7);
    assert!(r.checks.iter().all(|c| c.max_defect <= 1e-14));
}

#[test]
fn non_clifford_generators_are_rejected() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let g = CliffordRep::standard().generators().to_owned();
    let bad = [g[0], g[0], g[2]];
    assert!(CliffordRep::new(bad).is_err());
    let hermitian = Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0));
    assert!(CliffordRep::new([hermitian, g[1], g[2]]).is_err());
}

#[test]
fn sphere_spectrum_closed_form() {
    let s = sphere_dirac_spectrum(1.0, 12).unwrap();
    assert_eq!(&s[..4], &[1.0, -1.0, 1.0, -1.0]);
    assert_eq!(s[4], 2.0);
    assert_eq!(sphere_dirac_spectrum(2.0, 1).unwrap()[0], 0.5);
    assert!(matches!(sphere_dirac_spectrum(0.0, 1), Err(GeoError::NonPositive { .. })));
}

#[test]
fn reduced_unit_sphere_matches_closed_form() {
    let p = RevolutionDiracProblem::new(Arc::new(RoundSphere { radius: 1.0 }), 2.5, 2000);
    let s = revolution_dirac_spectrum(&p, 8).unwrap();
    let exact = sphere_dirac_spectrum(1.0, 8).unwrap();
    for (a, b) in s.values().iter().zip(&exact) {
        assert!((a - b).abs() <= 1e-4 * b.abs(), "{a} vs {b}");
    }
    assert!(s.symmetry_defect() <= 1e-12);
}

#[test]
fn reduced_sphere_converges_at_second_order() {
    let l = |n| {
        let p = RevolutionDiracProblem::new(Arc::new(RoundSphere { radius: 1.0 }), 1.5, n);
        revolution_dirac_spectrum(&p, 1).unwrap().lambda1()
    };
    let (a, b, c) = (l(100), l(200), l(400));
    let p = order((a - b).abs(), (b - c).abs());
    assert!(p > 1.8, "order {p}");
}

#[test]
fn narrow_mode_range_is_reported() {
    let p = RevolutionDiracProblem::new(Arc::new(RoundSphere { radius: 1.0 }), 0.5, 200);
    assert!(matches!(revolution_dirac_spectrum(&p, 2), Err(GeoError::ModeRangeInsufficient { .. })));
}

#[test]
fn open_profile_is_degenerate() {
    let p = CurveProfile {
        kind: ProfileKind::Sphere,
        length: 1.0,
        a: Arc::new(|_| 1.0),
        rho: Arc::new(|t| 1.0 + t),
    };
    let prob = RevolutionDiracProblem::new(Arc::new(p), 2.5, 100);
    assert!(matches!(revolution_dirac_spectrum(&prob, 2), Err(GeoError::ProfileDegenerate(_))));
}

#[test]
fn spheroid_satisfies_strict_mean_curvature_bound() {
    let prob = RevolutionDiracProblem::new(Arc::new(Spheroid { a: 1.0, c: 0.5 }), 3.5, 800);
    let l1 = revolution_dirac_spectrum(&prob, 2).unwrap().lambda1();
    let geo = geometry(&spheroid(Vec3::zeros(), 1.0, 0.5, 65, 128).unwrap(), 2.0);
    let (hmin, _) = geo.scan_range(&geo.mean_curvature);
    // the pole, where H = 2c/a^2, lies outside the scan band; include it
    let inf_h = hmin.min(1.0);
    assert!((hmin - 1.0).abs() < 1e-2, "{hmin}");
    assert!(l1 * l1 - 0.25 * inf_h * inf_h > 0.5, "lambda1 = {l1}");
}

#[test]
fn torus_spectrum_is_symmetric_and_bounded_below() {
    let prob = RevolutionDiracProblem::new(Arc::new(TorusProfile { major: 3.0, minor: 1.0 }), 4.5, 256);
    let s = revolution_dirac_spectrum(&prob, 6).unwrap();
    assert!(s.symmetry_defect() <= 1e-8);
    // Inner equator H = 1/a - 1/(R-a) = 1/2 gives the smallest |H| over the torus.
    let inf_h: f64 = 1.0 - 1.0 / 2.0;
    assert!(s.lambda1().powi(2) >= 0.25 * inf_h * inf_h);
    let other = prob.clone().with_torus_spin(TorusSpin { meridian_antiperiodic: false, longitude_antiperiodic: false });
    assert!(revolution_dirac_spectrum(&other, 2).unwrap().lambda1() < 1e-8);
}

#[test]
fn conformal_round_sphere_is_the_equality_case() {
    let c = conformal_bound_check(Arc::new(RoundSphere { radius: 1.0 }), Arc::new(|_| 2.0), 2.5, 2000).unwrap();
    assert!(c.margin.abs() <= 1e-4, "{c:?}");
    let bad = conformal_bound_check(Arc::new(RoundSphere { radius: 1.0 }), Arc::new(|t: f64| t.cos()), 2.5, 100);
    assert!(matches!(bad, Err(GeoError::NonPositive { .. })));
}

#[test]
fn conformal_spheroid_with_f_equal_h_attains_one_half() {
    let (a, c) = (1.0_f64, 0.5_f64);
    // H of the spheroid (a sin t, c cos t) as a function of t.
    let h = move |t: f64| {
        let q = (a * t.cos()).hypot(c * t.sin());
        a * c / q.powi(3) + c / (a * q)
    };
    // F^{-1/2} times a restricted parallel spinor is an eigenspinor for 1/2
    // on any surface in flat space.
    let b = conformal_bound_check(Arc::new(Spheroid { a, c }), Arc::new(h), 4.5, 800).unwrap();
    assert!(b.margin.abs() <= 1e-4, "{b:?}");
    // A factor below H lowers nothing: F = H/2 doubles the spectrum.
    let half = conformal_bound_check(Arc::new(Spheroid { a, c }), Arc::new(move |t| 0.5 * h(t)), 4.5, 800).unwrap();
    assert!((half.lambda1 - 1.0).abs() <= 1e-4, "{half:?}");
}

#[test]
fn constant_spinor_on_unit_sphere_gives_half_mean_curvature() {
    let rep = CliffordRep::standard();
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 33, 64).unwrap();
    let geo = geometry(&s, 2.0);
    let d = extrinsic_dirac_on_surface(&s, &geo, &rep, &PolynomialSpinor::constant(up())).unwrap();
    for k in (0..geo.len()).filter(|k| !geo.pole[*k]) {
        assert!((d[k] - up()).norm() < 1e-12);
    }
}

#[test]
fn parallel_spinor_defect_is_second_order() {
    let rep = CliffordRep::standard();
    let sphere = |n: usize| coordinate_sphere(Vec3::zeros(), 1.0, n + 1, 2 * n).unwrap().sampled().unwrap();
    let tor = |n: usize| torus(Vec3::zeros(), 3.0, 1.0, n, 2 * n).unwrap();
    let mut d_s = Vec::new();
    let mut d_t = Vec::new();
    for n in [16, 32, 64] {
        let s = sphere(n);
        let g = geometry(&s, 2.0);
        d_s.push(parallel_spinor_defect(&s, &g, &rep, up(), &vec![2.0; g.len()]).unwrap());
        let exact = geometry(&tor(n), 5.0);
        let t = tor(n).sampled().unwrap();
        let g = geometry(&t, 5.0);
        d_t.push(parallel_spinor_defect(&t, &g, &rep, up(), &exact.mean_curvature).unwrap());
    }
    for d in [&d_s, &d_t] {
        assert!(order(d[1], d[2]) >= 1.7, "{d:?}");
    }
}

#[test]
fn reilly_clifford_linear_matches_exact_value() {
    let rep = CliffordRep::standard();
    let radius = 1.5;
    let r = reilly_identity_flat_ball(&rep, &PolynomialSpinor::clifford_linear(&rep, up()), radius, 64).unwrap();
    // |grad psi|^2 = 3, |D psi|^2 = 9 for unit psi0 over the ball volume.
    let exact = -6.0 * 4.0 / 3.0 * PI * radius.powi(3);
    assert!((r.rhs - exact).abs() < 1e-6 * exact.abs());
    assert!((r.lhs - exact).abs() < 1e-2 * exact.abs());
}

#[test]
fn reilly_constant_spinor_vanishes() {
    let rep = CliffordRep::standard();
    let r = reilly_identity_flat_ball(&rep, &PolynomialSpinor::constant(up()), 1.0, 16).unwrap();
    assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
}

#[test]
fn reilly_defect_converges_for_all_families() {
    let rep = CliffordRep::standard();
    let fams = [
        PolynomialSpinor::clifford_linear(&rep, up()),
        PolynomialSpinor::one_quadratic(),
        PolynomialSpinor::random(3, 3, 1.0),
    ];
    for f in &fams {
        let d: Vec<f64> = [16, 32, 64].iter().map(|n| reilly_identity_flat_ball(&rep, f, 1.0, *n).unwrap().defect).collect();
        assert!(order(d[1], d[2]) >= 1.7, "{d:?}");
    }
}

#[test]
fn holographic_unit_sphere_parallel_spinor_is_zero() {
    let rep = CliffordRep::standard();
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 33, 64).unwrap();
    let geo = geometry(&s, 2.0);
    let r = holographic_inequality_check(&s, &geo, &rep, &[PolynomialSpinor::constant(up())], &vec![2.0; geo.len()]).unwrap();
    assert!(r.minimum.abs() < 1e-8, "{r:?}");
}

#[test]
fn holographic_schwarzschild_sphere_random_spinors() {
    let rep = CliffordRep::standard();
    let (m, r) = (1.0, 2.0);
    let (h, h0) = schwarzschild::mean_curvatures(m, r);
    let ra = schwarzschild::areal_radius(m, r);
    let s = coordinate_sphere(Vec3::zeros(), ra, 33, 64).unwrap();
    let geo = geometry(&s, 2.0 * ra);
    let mut spinors = standard_test_spinors(&rep, 50, ra, 11);
    spinors.push(PolynomialSpinor::constant(up()));
    let rep_ = holographic_inequality_check(&s, &geo, &rep, &spinors, &vec![h; geo.len()]).unwrap();
    assert!(rep_.values.iter().all(|v| *v >= 0.0), "{:?}", rep_.values);
    // The parallel spinor gives (1/4) int (H0^2/H - H).
    let expected = 0.25 * 4.0 * PI * ra * ra * (h0 * h0 / h - h);
    let last = *rep_.values.last().unwrap();
    assert!((last - expected).abs() < 1e-3 * expected, "{last} vs {expected}");
}

#[test]
fn holographic_rejects_vanishing_weight() {
    let rep = CliffordRep::standard();
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 17, 32).unwrap();
    let geo = geometry(&s, 2.0);
    let r = holographic_inequality_check(&s, &geo, &rep, &[PolynomialSpinor::constant(up())], &vec![0.0; geo.len()]);
    assert!(matches!(r, Err(GeoError::ZeroNormMeanCurvature { .. })));
}

fn unitary(a: f64, b: f64, c: f64) -> Endo {
    // exp of a skew-Hermitian combination of the standard generators
    let g = CliffordRep::standard();
    let g = g.generators();
    let x = g[0] * Complex64::from(a) + g[1] * Complex64::from(b) + g[2] * Complex64::from(c);
    let n = (a * a + b * b + c * c).sqrt();
    if n == 0.0 {
        return Endo::identity();
    }
    Endo::identity() * Complex64::from(n.cos()) + x * Complex64::from(n.sin() / n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conjugated_reps_satisfy_identities(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, seed in 0u64..1000) {
        let u = unitary(a, b, c);
        let g = CliffordRep::standard().generators().map(|x| u * x * u.adjoint());
        let rep = CliffordRep::new(g).unwrap();
        let r = clifford_identities(&rep, 20, seed);
        prop_assert!(r.checks.iter().all(|c| c.max_defect <= 1e-14), "{:?}", r.checks);
    }

    #[test]
    fn sphere_spectrum_scales_inversely(r in 0.2..5.0f64, k in 1.5..4.0f64) {
        let a = sphere_dirac_spectrum(r, 10).unwrap();
        let b = sphere_dirac_spectrum(k * r, 10).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x / k - y).abs() <= 1e-14 * x.abs());
        }
    }

    #[test]
    fn reduced_spectrum_scales_inversely(r in 0.3..3.0f64) {
        let spec = |rad: f64| {
            let p = RevolutionDiracProblem::new(Arc::new(RoundSphere { radius: rad }), 1.5, 200);
            revolution_dirac_spectrum(&p, 4).unwrap().values()
        };
        let (a, b) = (spec(1.0), spec(r));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x / r - y).abs() <= 1e-9 * x.abs());
        }
    }

    #[test]
    fn projections_are_complementary(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
        let v = Vec3::new(x, y, z);
        prop_assume!(v.norm() > 1e-3);
        let n = v / v.norm();
        let (p, m) = CliffordRep::standard().projections(&n);
        prop_assert!((p + m - Endo::identity()).norm() <= 1e-14);
        prop_assert!((p * p - p).norm() <= 1e-14);
        prop_assert!((p * m).norm() <= 1e-14);
    }
}
