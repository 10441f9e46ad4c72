use geotool_core::initial_data::*;
use geotool_core::tensor::{ChartDomain, CoordinateMap, Mat, Point, SphericalMap};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn cube(half: f64, n: usize) -> ChartDomain<3> {
    ChartDomain::closed([-half; 3], [half; 3], [n; 3]).unwrap()
}

fn flat_with(k: impl Fn(&Point<3>) -> Mat<3> + Send + Sync + 'static) -> InitialDataSet {
    InitialDataSet::from_callbacks("test", cube(2.0, 9), |_: &Point<3>| Mat::<3>::identity(), k).unwrap()
}

// mu for flat g from the constraint formula, contracted by hand
fn mu_flat_oracle(k: &Mat<3>) -> f64 {
    let mut k2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            k2 += k[(i, j)] * k[(i, j)];
        }
    }
    let tr = k[(0, 0)] + k[(1, 1)] + k[(2, 2)];
    0.5 * (tr * tr - k2)
}

// J_j = d_i (K_ij - tr K delta_ij) for flat g, fourth-order differences
fn j_flat_oracle(k: &dyn Fn(&Point<3>) -> Mat<3>, x: &Point<3>) -> Point<3> {
    let t = |y: Point<3>| {
        let m = k(&y);
        m - Mat::<3>::identity() * m.trace()
    };
    let h = 1e-3;
    let mut out = Point::<3>::zeros();
    for i in 0..3 {
        let mut e = Point::<3>::zeros();
        e[i] = h;
        let d = (t(x - e * 2.0) - t(x + e * 2.0) + (t(x + e) - t(x - e)) * 8.0) / (12.0 * h);
        for j in 0..3 {
            out[j] += d[(i, j)];
        }
    }
    out
}

#[test]
fn flat_vacuum_has_vanishing_densities() {
    let ids = InitialDataSet::flat(cube(1.0, 5));
    let x = Point::<3>::new(0.2, -0.5, 0.1);
    assert_eq!(energy_density(&ids, &x).unwrap(), 0.0);
    assert_eq!(momentum_density(&ids, &x).unwrap(), Point::<3>::zeros());
    let rep = dominant_energy_report(&ids).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.min_margin, 0.0);
}

#[test]
fn constant_trace_densities_match_hand_algebra() {
    for c in [-1.5, -0.2, 0.3, 2.0] {
        let ids = InitialDataSet::constant_trace(c, cube(1.0, 5));
        let x = Point::<3>::new(0.5, 0.5, -0.5);
        let mu = energy_density(&ids, &x).unwrap();
        assert!((mu - 3.0 * c * c).abs() < 1e-14 * (1.0 + c * c));
        assert!((mu - mu_flat_oracle(&(Mat::<3>::identity() * c))).abs() < 1e-14);
        assert_eq!(momentum_norm(&ids, &x).unwrap(), 0.0);
        let rep = dominant_energy_report(&ids).unwrap();
        assert!(rep.pass && (rep.min_margin - 3.0 * c * c).abs() <= 1e-6 * 3.0 * c * c);
    }
}

#[test]
fn constant_tensor_by_callback_has_no_momentum() {
    let ids = flat_with(|_| Mat::<3>::new(0.4, 0.1, 0.0, 0.1, -0.2, 0.3, 0.0, 0.3, 1.0));
    let j = momentum_density(&ids, &Point::<3>::new(0.1, 0.2, 0.3)).unwrap();
    assert!(j.amax() < 1e-9);
}

#[test]
fn schwarzschild_is_vacuum() {
    let ids = InitialDataSet::schwarzschild(1.0, cube(10.0, 5));
    for r in [0.6, 1.5, 4.0] {
        let x = Point::<3>::new(0.0, r * 0.6, r * 0.8);
        assert!(energy_density(&ids, &x).unwrap().abs() < 1e-12);
        assert_eq!(momentum_norm(&ids, &x).unwrap(), 0.0);
    }
}

#[test]
fn momentum_density_matches_dense_stencil_oracle() {
    let kf = |x: &Point<3>| Mat::<3>::from_diagonal(&Point::<3>::new(x[0], 0.0, 0.0)) * (1.0 + x[1] * x[1]);
    let ids = flat_with(kf);
    let mut rng = 0.137f64;
    for _ in 0..20 {
        let mut p = [0.0; 3];
        for v in p.iter_mut() {
            rng = (rng * 9301.0 + 0.4927).fract();
            *v = 3.0 * rng - 1.5;
        }
        let x = Point::<3>::from(p);
        let j = momentum_density(&ids, &x).unwrap();
        let o = j_flat_oracle(&kf, &x);
        assert!((j - o).amax() < 1e-6, "{j:?} vs {o:?}");
    }
}

#[test]
fn violating_data_is_located() {
    // K = A sin(x) e_y e_y: mu = 0 and |J| = A |cos x|, worst on the plane x = 0
    let a = 2.0;
    let ids = InitialDataSet::from_callbacks(
        "violating",
        cube(1.0, 9),
        |_: &Point<3>| Mat::<3>::identity(),
        move |x: &Point<3>| Mat::<3>::from_diagonal(&Point::<3>::new(0.0, a * x[0].sin(), 0.0)),
    )
    .unwrap();
    let rep = dominant_energy_report(&ids).unwrap();
    assert!(!rep.pass);
    assert!((rep.min_margin + a).abs() < 1e-6, "{}", rep.min_margin);
    assert!(rep.worst_point[0].abs() < 1e-12);
    let json = serde_json::to_value(&rep).unwrap();
    for key in ["label", "min_margin", "worst_point", "pass"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn densities_agree_across_charts() {
    let kf = |x: &Point<3>| {
        Mat::<3>::new(x[0], 0.2 * x[1], 0.0, 0.2 * x[1], 0.5, 0.1 * x[2] * x[0], 0.0, 0.1 * x[2] * x[0], -0.3 * x[1] * x[1])
    };
    let cart = InitialDataSet::from_callbacks(
        "bent",
        cube(4.0, 9),
        |x: &Point<3>| Mat::<3>::identity() * (1.0 + 0.1 * (-x.norm_squared()).exp()).powi(4),
        kf,
    )
    .unwrap();
    let map = SphericalMap { center: Point::<3>::zeros() };
    let chart = ChartDomain::new([0.5, 0.0, 0.0], [3.0, PI, 2.0 * PI], [9, 9, 16], [false, false, true]).unwrap();
    let sph = cart.pullback(Arc::new(map), chart);
    let y = Point::<3>::new(1.2, 1.0, 0.7);
    let x = map.point(&y);
    let (mc, ms) = (energy_density(&cart, &x).unwrap(), energy_density(&sph, &y).unwrap());
    assert!((mc - ms).abs() < 1e-5 * (1.0 + mc.abs()), "{mc} {ms}");
    let jc = momentum_density(&cart, &x).unwrap();
    let js = momentum_density(&sph, &y).unwrap();
    let jac = map.jacobian(&y);
    assert!((jac.transpose() * jc - js).amax() < 1e-5, "{jc:?} {js:?}");
    assert!((momentum_norm(&cart, &x).unwrap() - momentum_norm(&sph, &y).unwrap()).abs() < 1e-5);
}

proptest! {
    #[test]
    fn time_reversal_symmetry(c in proptest::collection::vec(-1.0f64..1.0, 6), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let kf = move |p: &Point<3>| {
            let a = c[0] + c[1] * p[0];
            let b = c[2] * p[1] * p[2];
            let d = c[3] + c[4] * p[1] * p[1] + c[5] * p[0];
            Mat::<3>::new(a, b, 0.0, b, d, c[5], 0.0, c[5], a * d)
        };
        let ids = flat_with(kf);
        let rev = ids.time_reversed();
        let p = Point::<3>::new(x, y, 0.3);
        let (m1, m2) = (energy_density(&ids, &p).unwrap(), energy_density(&rev, &p).unwrap());
        prop_assert!((m1 - m2).abs() < 1e-14 * (1.0 + m1.abs()));
        let (j1, j2) = (momentum_density(&ids, &p).unwrap(), momentum_density(&rev, &p).unwrap());
        prop_assert!((j1 + j2).amax() < 1e-12);
    }

    #[test]
    fn pure_trace_data(lambda in -5.0f64..5.0, x in -1.0f64..1.0) {
        let ids = InitialDataSet::constant_trace(lambda, cube(1.0, 5));
        let p = Point::<3>::new(x, 0.0, -x);
        prop_assert!((energy_density(&ids, &p).unwrap() - 3.0 * lambda * lambda).abs() < 1e-12 * (1.0 + lambda * lambda));
        prop_assert_eq!(momentum_norm(&ids, &p).unwrap(), 0.0);
    }
}
