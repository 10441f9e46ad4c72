//! Initial data sets `(M, g, K)`, constraint densities and the dominant
//! energy condition.

use crate::error::{GeoError, Result};
use crate::tensor::{
    divergence_neg_tensor, scalar_curvature_from_jet, Analytic, Callback, ChartDomain, Constant, CoordinateMap, Field,
    GridField, Jet, Mat, MetricField, Point, Pullback, TensorField,
};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone)]
pub struct InitialDataSet {
    pub label: String,
    pub metric: MetricField<3>,
    pub extrinsic: TensorField<3>,
}

impl std::fmt::Debug for InitialDataSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InitialDataSet").field("label", &self.label).field("chart", self.chart()).finish()
    }
}

/// Isotropic Schwarzschild conformal factor `1 + M / (2 |x|)` with its first
/// and second derivatives.
pub fn schwarzschild_factor(mass: f64, x: &Point<3>) -> (f64, Point<3>, Mat<3>) {
    let r = x.norm();
    let u = 1.0 + mass / (2.0 * r);
    let du = -x * (mass / (2.0 * r.powi(3)));
    let ddu = (Mat::<3>::identity() * r * r - x * x.transpose() * 3.0) * (-mass / (2.0 * r.powi(5)));
    (u, du, ddu)
}

impl InitialDataSet {
    pub fn new(label: impl Into<String>, metric: MetricField<3>, extrinsic: TensorField<3>) -> Result<Self> {
        if metric.domain() != extrinsic.domain() {
            return Err(GeoError::InvalidData("metric and extrinsic curvature live on different charts".into()));
        }
        Ok(Self { label: label.into(), metric, extrinsic })
    }

    pub fn chart(&self) -> &ChartDomain<3> {
        self.metric.domain()
    }

    /// Euclidean metric, `K = 0`.
    pub fn flat(chart: ChartDomain<3>) -> Self {
        Self::constant_trace(0.0, chart).relabel("flat")
    }

    /// Euclidean metric, `K = c g`.
    pub fn constant_trace(c: f64, chart: ChartDomain<3>) -> Self {
        let k = Arc::new(Constant::new(chart.clone(), Mat::<3>::identity() * c));
        Self { label: format!("constant_trace(c={c})"), metric: MetricField::euclidean(chart), extrinsic: k }
    }

    /// Time-symmetric Schwarzschild slice in isotropic coordinates,
    /// `g = (1 + M/2r)^4 delta`, `K = 0`.
    pub fn schwarzschild(mass: f64, chart: ChartDomain<3>) -> Self {
        let g = Analytic::new(chart.clone(), move |x: &Point<3>| {
            let (u, du, ddu) = schwarzschild_factor(mass, x);
            let id = Mat::<3>::identity();
            let u3 = u * u * u;
            Jet {
                value: id * (u3 * u),
                gradient: std::array::from_fn(|k| id * (4.0 * u3 * du[k])),
                hessian: std::array::from_fn(|k| {
                    std::array::from_fn(|l| id * (12.0 * u * u * du[k] * du[l] + 4.0 * u3 * ddu[(k, l)]))
                }),
            }
        });
        let k = Arc::new(Constant::new(chart, Mat::<3>::zeros()));
        Self { label: format!("schwarzschild(M={mass})"), metric: MetricField::new(Arc::new(g)), extrinsic: k }
    }

    /// Data given by callbacks; derivatives by central differences.
    pub fn from_callbacks(
        label: impl Into<String>,
        chart: ChartDomain<3>,
        g: impl Fn(&Point<3>) -> Mat<3> + Send + Sync + 'static,
        k: impl Fn(&Point<3>) -> Mat<3> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(
            label,
            MetricField::new(Arc::new(Callback::new(chart.clone(), g))),
            Arc::new(Callback::new(chart, k)),
        )
    }

    /// Data sampled at the chart nodes.
    pub fn from_tables(label: impl Into<String>, chart: ChartDomain<3>, g: Vec<Mat<3>>, k: Vec<Mat<3>>) -> Result<Self> {
        for (i, m) in k.iter().enumerate() {
            if crate::tensor::linalg::asymmetry(m) > 1e-12 {
                return Err(GeoError::InvalidData(format!("extrinsic curvature sample {i} is not symmetric")));
            }
        }
        let metric = MetricField::grid(chart.clone(), g)?;
        Self::new(label, metric, Arc::new(GridField::new(chart, k)?))
    }

    /// The same data expressed in the coordinates `y` of `chart`, where
    /// `map(y)` gives the coordinates of this data set's chart.
    pub fn pullback(&self, map: Arc<dyn CoordinateMap>, chart: ChartDomain<3>) -> Self {
        let g = Pullback::new(chart.clone(), self.metric.field().clone(), map.clone());
        let k = Pullback::new(chart, self.extrinsic.clone(), map);
        Self { label: self.label.clone(), metric: MetricField::new(Arc::new(g)), extrinsic: Arc::new(k) }
    }

    /// Same metric with `K` replaced by `-K`.
    pub fn time_reversed(&self) -> Self {
        Self {
            label: format!("{} (K -> -K)", self.label),
            metric: self.metric.clone(),
            extrinsic: Arc::new(Negated(self.extrinsic.clone())),
        }
    }

    fn relabel(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }
}

struct Negated(TensorField<3>);

impl Field<3, Mat<3>> for Negated {
    fn domain(&self) -> &ChartDomain<3> {
        self.0.domain()
    }
    fn value(&self, x: &Point<3>) -> Result<Mat<3>> {
        Ok(-self.0.value(x)?)
    }
    fn gradient(&self, x: &Point<3>) -> Result<[Mat<3>; 3]> {
        Ok(self.0.gradient(x)?.map(|m| -m))
    }
    fn hessian(&self, x: &Point<3>) -> Result<[[Mat<3>; 3]; 3]> {
        Ok(self.0.hessian(x)?.map(|r| r.map(|m| -m)))
    }
}

/// `K - tr_g(K) g`, differentiable once.
struct TraceReversed<'a> {
    ids: &'a InitialDataSet,
}

impl Field<3, Mat<3>> for TraceReversed<'_> {
    fn domain(&self) -> &ChartDomain<3> {
        self.ids.chart()
    }
    fn value(&self, x: &Point<3>) -> Result<Mat<3>> {
        let g = self.ids.metric.value(x)?;
        let ginv = self.ids.metric.inverse(x)?;
        let k = self.ids.extrinsic.value(x)?;
        Ok(k - g * ginv.component_mul(&k).sum())
    }
    fn gradient(&self, x: &Point<3>) -> Result<[Mat<3>; 3]> {
        let jet = self.ids.metric.jet1(x)?;
        let k = self.ids.extrinsic.value(x)?;
        let dk = self.ids.extrinsic.gradient(x)?;
        let tr = jet.ginv.component_mul(&k).sum();
        Ok(std::array::from_fn(|c| {
            let dginv = -(jet.ginv * jet.dg[c] * jet.ginv);
            let dtr = dginv.component_mul(&k).sum() + jet.ginv.component_mul(&dk[c]).sum();
            dk[c] - jet.g * dtr - jet.dg[c] * tr
        }))
    }
    fn hessian(&self, _x: &Point<3>) -> Result<[[Mat<3>; 3]; 3]> {
        Err(GeoError::Unsupported("second derivatives of K - tr(K) g".into()))
    }
}

/// `|K|^2_g` and `tr_g K`.
pub fn extrinsic_invariants(ginv: &Mat<3>, k: &Mat<3>) -> (f64, f64) {
    let raised = ginv * k * ginv;
    (raised.component_mul(k).sum(), ginv.component_mul(k).sum())
}

/// `mu = (R - |K|^2 + (tr K)^2) / 2`.
pub fn energy_density(ids: &InitialDataSet, x: &Point<3>) -> Result<f64> {
    let jet = ids.metric.jet2(x)?;
    let r = scalar_curvature_from_jet(&jet);
    let (k2, tr) = extrinsic_invariants(&jet.ginv, &ids.extrinsic.value(x)?);
    Ok(0.5 * (r - k2 + tr * tr))
}

/// `J = -delta(K - tr(K) g)` as a covector, with `delta` the negative
/// divergence.
pub fn momentum_density(ids: &InitialDataSet, x: &Point<3>) -> Result<Point<3>> {
    Ok(-divergence_neg_tensor(&ids.metric, &TraceReversed { ids }, x)?)
}

/// Metric norm of the momentum density.
pub fn momentum_norm(ids: &InitialDataSet, x: &Point<3>) -> Result<f64> {
    let j = momentum_density(ids, x)?;
    Ok(ids.metric.norm_sq_covector(x, &j)?.max(0.0).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct DecReport {
    pub label: String,
    pub min_margin: f64,
    pub worst_point: Vec<f64>,
    pub max_energy_density: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

/// Sweep of `mu - |J|` over every node of the data chart.
pub fn dominant_energy_report(ids: &InitialDataSet) -> Result<DecReport> {
    dominant_energy_report_on(ids, &ids.chart().clone())
}

/// Sweep of `mu - |J|` over the nodes of `grid`, which must lie in the data
/// chart. Nodes where the data are singular are reported as errors.
pub fn dominant_energy_report_on(ids: &InitialDataSet, grid: &ChartDomain<3>) -> Result<DecReport> {
    let samples: Vec<(f64, f64)> = (0..grid.node_count())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            let mu = energy_density(ids, &x)?;
            Ok((mu - momentum_norm(ids, &x)?, mu))
        })
        .collect::<Result<_>>()?;
    let mut worst = 0;
    let mut max_mu: f64 = 0.0;
    for (k, (m, mu)) in samples.iter().enumerate() {
        if *m < samples[worst].0 {
            worst = k;
        }
        max_mu = max_mu.max(mu.abs());
    }
    let tolerance = 1e-8 * max_mu.max(1.0);
    let min_margin = samples[worst].0;
    Ok(DecReport {
        label: ids.label.clone(),
        min_margin,
        worst_point: grid.point(worst).iter().copied().collect(),
        max_energy_density: max_mu,
        tolerance,
        samples: samples.len(),
        pass: min_margin >= -tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::SphericalMap;

    fn cube(n: usize) -> ChartDomain<3> {
        ChartDomain::closed([-1.0; 3], [1.0; 3], [n; 3]).unwrap()
    }

    #[test]
    fn constant_trace_densities() {
        let ids = InitialDataSet::constant_trace(0.3, cube(5));
        let x = Point::<3>::new(0.1, 0.2, -0.3);
        assert!((energy_density(&ids, &x).unwrap() - 0.27).abs() < 1e-15);
        assert_eq!(momentum_norm(&ids, &x).unwrap(), 0.0);
        let rep = dominant_energy_report(&ids).unwrap();
        assert!(rep.pass);
        assert!((rep.min_margin - 0.27).abs() < 1e-15);
    }

    #[test]
    fn schwarzschild_is_vacuum() {
        let chart = ChartDomain::closed([0.5, 0.5, 0.5], [3.0, 3.0, 3.0], [4; 3]).unwrap();
        let ids = InitialDataSet::schwarzschild(1.0, chart);
        for p in [Point::<3>::new(0.6, 0.7, 0.5), Point::<3>::new(2.0, 1.0, 3.0)] {
            assert!(energy_density(&ids, &p).unwrap().abs() < 1e-13);
        }
        assert!(dominant_energy_report(&ids).unwrap().pass);
    }

    #[test]
    fn singular_point_is_reported() {
        let ids = InitialDataSet::schwarzschild(1.0, cube(3));
        assert!(matches!(dominant_energy_report(&ids), Err(GeoError::SingularMetric { .. })));
    }

    #[test]
    fn pullback_derivatives_match_differences() {
        let base = InitialDataSet::schwarzschild(1.0, ChartDomain::closed([-4.0; 3], [4.0; 3], [4; 3]).unwrap());
        let chart = ChartDomain::new([1.0, 0.2, 0.0], [3.0, 2.9, 6.0], [5, 5, 5], [false, false, false]).unwrap();
        let map = Arc::new(SphericalMap { center: Point::<3>::zeros() });
        let sph = base.pullback(map, chart);
        let y = Point::<3>::new(1.7, 1.1, 0.8);
        let g = sph.metric.field();
        let grad = g.gradient(&y).unwrap();
        for a in 0..3 {
            let h = 1e-6;
            let mut yp = y;
            let mut ym = y;
            yp[a] += h;
            ym[a] -= h;
            let fd = (g.value(&yp).unwrap() - g.value(&ym).unwrap()) / (2.0 * h);
            assert!((fd - grad[a]).amax() < 1e-7, "axis {a}");
        }
        // R is a scalar: zero in both charts
        assert!(energy_density(&sph, &y).unwrap().abs() < 1e-7);
    }
}
