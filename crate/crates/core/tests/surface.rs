use geotool_core::initial_data::InitialDataSet;
use geotool_core::surface::families::*;
use geotool_core::surface::*;
use geotool_core::tensor::{ChartDomain, Constant, Mat, MetricField, TensorField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn box_chart(half: f64) -> ChartDomain<3> {
    ChartDomain::closed([-half; 3], [half; 3], [5; 3]).unwrap()
}

fn flat(half: f64) -> MetricField<3> {
    MetricField::euclidean(box_chart(half))
}

fn expansions_for(s: &SurfaceEmbedding, ids: &InitialDataSet) -> (SurfaceGeometry, NullExpansionField) {
    let geo = SurfaceGeometry::compute(s, &ids.metric).unwrap();
    let tr = trace_sigma_k(&geo, &ids.extrinsic).unwrap();
    let n = null_expansions(&geo, &geo.mean_curvature.clone(), &tr);
    (geo, n)
}

fn scanned(geo: &SurfaceGeometry) -> impl Iterator<Item = usize> + '_ {
    (0..geo.len()).filter(|k| geo.scan_mask[*k])
}

#[test]
fn induced_metric_of_coordinate_spheres() {
    let r = 1.7;
    let s = coordinate_sphere(Vec3::zeros(), r, 17, 16).unwrap();
    let g = induced_metric(&s, &flat(5.0)).unwrap();
    let ids = InitialDataSet::schwarzschild(0.8, box_chart(5.0));
    let gs = induced_metric(&s, &ids.metric).unwrap();
    let u4 = (1.0 + 0.8 / (2.0 * r)).powi(4);
    for k in 0..g.len() {
        let t = s.domain.point(k)[0];
        let expect = Mat::<2>::from_diagonal(&nalgebra::Vector2::new(r * r, (r * t.sin()).powi(2)));
        assert!((g[k] - expect).amax() < 1e-13);
        assert!((gs[k] - expect * u4).amax() < 1e-12);
    }
}

#[test]
fn torus_induced_metric_and_area() {
    let (big_r, a) = (3.0, 1.0);
    let s = torus(Vec3::zeros(), big_r, a, 24, 32).unwrap();
    let g = induced_metric(&s, &flat(6.0)).unwrap();
    for k in 0..g.len() {
        let v = s.domain.point(k)[0];
        assert!((g[k][(0, 0)] - a * a).abs() < 1e-13);
        assert!((g[k][(1, 1)] - (big_r + a * v.cos()).powi(2)).abs() < 1e-12);
        assert!(g[k][(0, 1)].abs() < 1e-13);
    }
}

#[test]
fn shape_operator_orientation_and_closed_forms() {
    let r = 2.5;
    let s = coordinate_sphere(Vec3::new(0.1, 0.0, -0.2), r, 33, 32).unwrap();
    let geo = SurfaceGeometry::compute(&s, &flat(6.0)).unwrap();
    for k in scanned(&geo) {
        assert!((geo.shape[k] - Mat::<2>::identity() / r).amax() < 1e-12);
        assert!((geo.mean_curvature[k] - 2.0 / r).abs() < 1e-12);
    }
    // Schwarzschild: H = u^-2 (2/r + 4 u'/u)
    let m = 1.0;
    let ids = InitialDataSet::schwarzschild(m, box_chart(10.0));
    for r in [0.7, 1.0, 4.0] {
        let s = coordinate_sphere(Vec3::zeros(), r, 17, 16).unwrap();
        let geo = SurfaceGeometry::compute(&s, &ids.metric).unwrap();
        let u = 1.0 + m / (2.0 * r);
        let h = (2.0 / r - 4.0 * m / (2.0 * r * r) / u) / (u * u);
        for k in scanned(&geo) {
            assert!((geo.mean_curvature[k] - h).abs() < 1e-12 * (1.0 + h.abs()));
        }
        assert!(geo.umbilicity_defect() < 1e-12);
    }
}

#[test]
fn minimal_sphere_of_schwarzschild() {
    // the coordinate sphere r = M/2 is minimal
    let ids = InitialDataSet::schwarzschild(2.0, box_chart(4.0));
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 17, 16).unwrap();
    let geo = SurfaceGeometry::compute(&s, &ids.metric).unwrap();
    assert!(scanned(&geo).all(|k| geo.mean_curvature[k].abs() < 1e-13));
}

#[test]
fn torus_principal_curvatures_inner_orientation() {
    let (big_r, a) = (3.0, 1.0);
    let s = torus(Vec3::zeros(), big_r, a, 32, 64).unwrap();
    let geo = SurfaceGeometry::compute(&s, &flat(6.0)).unwrap();
    for k in 0..geo.len() {
        let v = s.domain.point(k)[0];
        let eig = geo.shape[k].symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        let k2 = v.cos() / (big_r + a * v.cos());
        assert!((hi - 1.0 / a).abs() < 1e-12 && (lo - k2).abs() < 1e-12);
    }
    let h: Vec<f64> = geo.mean_curvature.clone();
    let grid_min = (0..geo.len()).map(|k| h[k]).fold(f64::INFINITY, f64::min);
    // brute-force oracle over the meridian angle
    let oracle_min = (0..10_000)
        .map(|i| {
            let v = i as f64 * std::f64::consts::TAU / 10_000.0;
            1.0 / a + v.cos() / (big_r + a * v.cos())
        })
        .fold(f64::INFINITY, f64::min);
    assert!(grid_min > 0.0 && oracle_min > 0.0);
    assert_eq!(dichotomy_check(&h, &geo.scan_mask, 1e-12), Dichotomy::MeanConvex);
}

#[test]
fn shape_operator_self_adjoint_on_sampled_surfaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = spheroid(Vec3::zeros(), 1.0, 0.6, 33, 64).unwrap().sampled().unwrap();
    let ids = InitialDataSet::schwarzschild(0.3, box_chart(3.0));
    let geo = SurfaceGeometry::compute(&s, &ids.metric).unwrap();
    for k in scanned(&geo) {
        let x = nalgebra::Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let y = nalgebra::Vector2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (g, a) = (geo.induced[k], geo.shape[k]);
        let d = (a * x).dot(&(g * y)) - x.dot(&(g * (a * y)));
        assert!(d.abs() < 1e-12 * (g.amax() * a.amax()).max(1.0), "{d}");
    }
}

#[test]
fn sign_change_of_expansions_is_not_untrapped() {
    // hand-built fields: every node is pointwise untrapped but theta_+ flips sign
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 9, 8).unwrap();
    let geo = SurfaceGeometry::compute(&s, &flat(3.0)).unwrap();
    let h: Vec<f64> = (0..geo.len()).map(|k| if s.domain.point(k)[0] < 1.5 { 1.0 } else { -1.0 }).collect();
    let n = null_expansions(&geo, &h, &vec![0.0; geo.len()]);
    assert_eq!(classify(&n, 1e-12).label, CausalClass::Mixed);
    assert_eq!(dichotomy_check(&h, &geo.scan_mask, 1e-12), Dichotomy::Violation);
}

#[test]
fn trace_sigma_k_examples() {
    let s = coordinate_sphere(Vec3::zeros(), 1.3, 17, 16).unwrap();
    let geo = SurfaceGeometry::compute(&s, &flat(3.0)).unwrap();
    let zero: TensorField<3> = Arc::new(Constant::new(box_chart(3.0), Mat::<3>::zeros()));
    assert!(trace_sigma_k(&geo, &zero).unwrap().iter().all(|v| *v == 0.0));
    let c = -0.7;
    let cg: TensorField<3> = Arc::new(Constant::new(box_chart(3.0), Mat::<3>::identity() * c));
    assert!(trace_sigma_k(&geo, &cg).unwrap().iter().all(|v| (v - 2.0 * c).abs() < 1e-13));
    let kd = [0.4, -1.1, 2.0];
    let diag: TensorField<3> = Arc::new(Constant::new(box_chart(3.0), Mat::<3>::from_diagonal(&Vec3::from(kd))));
    let tr = trace_sigma_k(&geo, &diag).unwrap();
    for k in scanned(&geo) {
        let nu = geo.positions[k].normalize();
        let expect = kd.iter().sum::<f64>() - (0..3).map(|i| kd[i] * nu[i] * nu[i]).sum::<f64>();
        assert!((tr[k] - expect).abs() < 1e-13);
    }
}

#[test]
fn constant_trace_sphere_classification_over_grid() {
    // theta_pm = 2c +- 2/r, trapped iff c < -1/r
    for r in [0.5, 1.0, 2.0] {
        let s = coordinate_sphere(Vec3::zeros(), r, 9, 8).unwrap();
        for i in 0..41 {
            let c = -3.0 / r + i as f64 * 0.15 / r;
            let ids = InitialDataSet::constant_trace(c, box_chart(3.0));
            let (_, n) = expansions_for(&s, &ids);
            let label = classify(&n, 1e-12).label;
            let marginal = (c * r + 1.0).abs() < 1e-9 || (c * r - 1.0).abs() < 1e-9;
            if marginal {
                assert_eq!(label, CausalClass::MarginallyTrapped, "c = {c}, r = {r}");
            } else if c < -1.0 / r {
                assert_eq!(label, CausalClass::Trapped, "c = {c}, r = {r}");
            } else if c < 1.0 / r {
                assert_eq!(label, CausalClass::Untrapped, "c = {c}, r = {r}");
            } else {
                assert_eq!(label, CausalClass::Mixed, "c = {c}, r = {r}");
            }
        }
    }
}

#[test]
fn flat_and_special_spheres() {
    let r = 2.0;
    let s = coordinate_sphere(Vec3::zeros(), r, 17, 16).unwrap();
    let (geo, n) = expansions_for(&s, &InitialDataSet::flat(box_chart(3.0)));
    for k in scanned(&geo) {
        assert!((n.theta_plus[k] - 2.0 / r).abs() < 1e-13 && (n.theta_minus[k] + 2.0 / r).abs() < 1e-13);
        assert!((n.norm_h_sq[k].sqrt() - 2.0 / r).abs() < 1e-13);
    }
    assert_eq!(classify(&n, 1e-12).label, CausalClass::Untrapped);
    let (_, n) = expansions_for(&s, &InitialDataSet::constant_trace(-1.0 / r, box_chart(3.0)));
    assert!(n.theta_plus.iter().zip(&n.mask).filter(|(_, m)| **m).all(|(t, _)| t.abs() < 1e-14));
    assert_eq!(classify(&n, 1e-12).label, CausalClass::MarginallyTrapped);
    let (_, n) = expansions_for(&s, &InitialDataSet::constant_trace(-2.0 / r, box_chart(3.0)));
    assert_eq!(classify(&n, 1e-12).label, CausalClass::Trapped);
}

#[test]
fn orientation_flip() {
    let s = spheroid(Vec3::zeros(), 1.0, 0.7, 17, 16).unwrap();
    let ids = InitialDataSet::constant_trace(0.3, box_chart(3.0));
    let (geo, n) = expansions_for(&s, &ids);
    let (geo_o, n_o) = expansions_for(&s.clone().with_orientation(Orientation::Outer), &ids);
    for k in scanned(&geo) {
        assert!((n.theta_plus[k] - n_o.theta_minus[k]).abs() < 1e-13);
        assert!((geo.mean_curvature[k] + geo_o.mean_curvature[k]).abs() < 1e-13);
    }
    assert_eq!(classify(&n, 1e-12).label, classify(&n_o, 1e-12).label);
    assert_eq!(dichotomy_check(&n.mean_curvature, &n.mask, 1e-12), Dichotomy::MeanConvex);
    assert_eq!(dichotomy_check(&n_o.mean_curvature, &n_o.mask, 1e-12), Dichotomy::MeanConcave);
}

#[test]
fn comparison_mean_curvature() {
    // Schwarzschild coordinate sphere against the round sphere of the same area
    let (m, r) = (1.0, 2.0);
    let ids = InitialDataSet::schwarzschild(m, box_chart(5.0));
    let s = coordinate_sphere(Vec3::zeros(), r, 33, 32).unwrap();
    let geo = SurfaceGeometry::compute(&s, &ids.metric).unwrap();
    let u = 1.0 + m / (2.0 * r);
    let cmp = comparison_h0(&EuclideanImmersion::round_sphere(&s.domain, r * u * u), &s, &geo).unwrap();
    assert!(cmp.isometry_defect < 1e-12);
    for k in scanned(&geo) {
        assert!((cmp.h0[k] - 2.0 / (r * u * u)).abs() < 1e-13);
    }
    for surf in [coordinate_sphere(Vec3::zeros(), 1.5, 17, 16).unwrap(), torus(Vec3::zeros(), 3.0, 1.0, 16, 24).unwrap()] {
        let geo = SurfaceGeometry::compute(&surf, &flat(6.0)).unwrap();
        let cmp = comparison_h0(&EuclideanImmersion::identity(&surf), &surf, &geo).unwrap();
        assert_eq!(cmp.isometry_defect, 0.0);
        assert!(scanned(&geo).all(|k| (cmp.h0[k] - geo.mean_curvature[k]).abs() < 1e-13));
    }
}

#[test]
fn non_isometric_comparison_is_reported() {
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 17, 16).unwrap();
    let geo = SurfaceGeometry::compute(&s, &flat(3.0)).unwrap();
    let cmp = comparison_h0(&EuclideanImmersion::round_sphere(&s.domain, 1.1), &s, &geo).unwrap();
    assert!((cmp.isometry_defect - 0.21).abs() < 1e-12);
}

#[test]
fn surface_report_keys() {
    let s = coordinate_sphere(Vec3::zeros(), 1.0, 17, 16).unwrap();
    let (geo, n) = expansions_for(&s, &InitialDataSet::flat(box_chart(3.0)));
    let rep = surface_report("flat", &geo, &n, 1e-12, None);
    let json = serde_json::to_value(&rep).unwrap();
    for key in ["h_min", "h_max", "trk_min", "trk_max", "theta_plus_min", "theta_minus_max", "classification", "dichotomy", "isometry_defect"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["classification"], "untrapped");
    assert_eq!(json["dichotomy"], "mean_convex");
}

fn random_untrapped_scenario(rng: &mut ChaCha8Rng) -> (SurfaceEmbedding, InitialDataSet) {
    let r0 = rng.gen_range(0.5..2.0);
    let terms: Vec<HarmonicTerm> = (0..3)
        .map(|_| {
            let l = rng.gen_range(1..4u32);
            let m = rng.gen_range(-(l as i32)..=l as i32);
            HarmonicTerm { l, m, amplitude: rng.gen_range(-0.02..0.02) * r0 }
        })
        .collect();
    let s = graph_over_sphere(Vec3::zeros(), r0, &terms, 17, 16).unwrap();
    let kind = rng.gen_range(0..3);
    let chart = box_chart(4.0);
    let ids = match kind {
        0 => InitialDataSet::flat(chart),
        1 => InitialDataSet::constant_trace(rng.gen_range(-0.5..0.5) / r0, chart),
        _ => InitialDataSet::schwarzschild(rng.gen_range(0.0..0.5) * r0, chart),
    };
    (s, ids)
}

#[test]
fn untrapped_surfaces_are_mean_convex_or_concave() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    while tested < 200 {
        let (mut s, ids) = random_untrapped_scenario(&mut rng);
        if rng.gen_bool(0.5) {
            s = s.with_orientation(Orientation::Outer);
        }
        let (_, n) = expansions_for(&s, &ids);
        if classify(&n, 1e-12).label != CausalClass::Untrapped {
            continue;
        }
        tested += 1;
        assert_ne!(dichotomy_check(&n.mean_curvature, &n.mask, 1e-12), Dichotomy::Violation);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn expansion_identities(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, ids) = random_untrapped_scenario(&mut rng);
        let (_, n) = expansions_for(&s, &ids);
        for k in 0..n.theta_plus.len() {
            let (tp, tm, h) = (n.theta_plus[k], n.theta_minus[k], n.mean_curvature[k]);
            let scale = h * h + n.trace_sigma_k[k].powi(2);
            prop_assert!((tp * tm + n.norm_h_sq[k]).abs() <= 1e-12 * scale.max(1.0));
            prop_assert!((tp - tm - 2.0 * h).abs() <= 1e-12 * h.abs().max(1.0));
        }
    }

    #[test]
    fn classification_invariant_under_flip(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, ids) = random_untrapped_scenario(&mut rng);
        let (_, n) = expansions_for(&s, &ids);
        let (_, m) = expansions_for(&s.clone().with_orientation(Orientation::Outer), &ids);
        prop_assert_eq!(classify(&n, 1e-12).label, classify(&m, 1e-12).label);
        let (a, b) = (dichotomy_check(&n.mean_curvature, &n.mask, 1e-12), dichotomy_check(&m.mean_curvature, &m.mask, 1e-12));
        match a {
            Dichotomy::MeanConvex => prop_assert_eq!(b, Dichotomy::MeanConcave),
            Dichotomy::MeanConcave => prop_assert_eq!(b, Dichotomy::MeanConvex),
            Dichotomy::Violation => prop_assert_eq!(b, Dichotomy::Violation),
        }
    }

    #[test]
    fn conformally_flat_spheres_are_umbilic(m in 0.0f64..2.0, r in 0.6f64..4.0) {
        let ids = InitialDataSet::schwarzschild(m, box_chart(5.0));
        let s = coordinate_sphere(Vec3::zeros(), r, 9, 8).unwrap();
        let geo = SurfaceGeometry::compute(&s, &ids.metric).unwrap();
        prop_assert!(geo.umbilicity_defect() < 1e-10);
    }
}
