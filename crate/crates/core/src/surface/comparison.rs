use super::geometry::SurfaceGeometry;
use super::{EmbeddingMap, Orientation, OutwardHint, SurfaceEmbedding};
use crate::error::Result;
use crate::tensor::{Analytic, ChartDomain, Jet, MetricField, Point};
use std::sync::Arc;

/// Immersion of the surface's parameter domain into Euclidean space used for
/// the comparison mean curvature.
#[derive(Clone)]
pub struct EuclideanImmersion {
    pub label: String,
    pub map: EmbeddingMap,
    pub outward_hint: Option<OutwardHint>,
}

impl EuclideanImmersion {
    /// The surface's own coordinate map read as a map into Euclidean space.
    pub fn identity(s: &SurfaceEmbedding) -> Self {
        Self { label: "identity".into(), map: s.map.clone(), outward_hint: s.outward_hint.clone() }
    }

    /// Round sphere of the given radius in the (theta, phi) parametrization.
    pub fn round_sphere(domain: &ChartDomain<2>, radius: f64) -> Self {
        let map = Arc::new(Analytic::new(domain.clone(), move |x: &Point<2>| {
            let (st, ct) = x[0].sin_cos();
            let (sp, cp) = x[1].sin_cos();
            let r = radius;
            let n = Point::<3>::new(st * cp, st * sp, ct);
            let nt = Point::<3>::new(ct * cp, ct * sp, -st);
            let np = Point::<3>::new(-st * sp, st * cp, 0.0);
            let ntp = Point::<3>::new(-ct * sp, ct * cp, 0.0);
            let npp = Point::<3>::new(-st * cp, -st * sp, 0.0);
            Jet { value: n * r, gradient: [nt * r, np * r], hessian: [[-n * r, ntp * r], [ntp * r, npp * r]] }
        }));
        Self {
            label: format!("round_sphere(radius={radius})"),
            map,
            outward_hint: Some(Arc::new(|_p: &Point<2>, x: &Point<3>| *x)),
        }
    }

    /// Sampled version (grid stencils for all derivatives).
    pub fn sampled(&self, domain: &ChartDomain<2>) -> Result<Self> {
        let grid = crate::tensor::GridField::sample(domain.clone(), self.map.as_ref())?;
        Ok(Self { map: Arc::new(grid), ..self.clone() })
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub h0: Vec<f64>,
    pub geometry: SurfaceGeometry,
    /// Largest entry of the difference of the two induced metrics.
    pub isometry_defect: f64,
}

fn euclidean_around(geo_positions: impl Iterator<Item = Point<3>>) -> Result<MetricField<3>> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in geo_positions {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let pad = (0..3).map(|a| hi[a] - lo[a]).fold(1.0, f64::max);
    let chart = ChartDomain::closed(lo.map(|v| v - pad), hi.map(|v| v + pad), [3; 3])?;
    Ok(MetricField::euclidean(chart))
}

/// Mean curvature of the Euclidean immersion, inner orientation, and the
/// isometry defect against the surface's induced metric.
pub fn comparison_h0(e: &EuclideanImmersion, s: &SurfaceEmbedding, surface_geo: &SurfaceGeometry) -> Result<ComparisonReport> {
    let image = SurfaceEmbedding {
        label: e.label.clone(),
        domain: s.domain.clone(),
        topology: s.topology,
        map: e.map.clone(),
        orientation: Orientation::Inner,
        outward_hint: e.outward_hint.clone(),
    };
    let pts: Vec<Point<3>> = (0..s.domain.node_count())
        .map(|k| e.map.value(&s.domain.point(k)))
        .collect::<Result<_>>()?;
    let flat = euclidean_around(pts.into_iter())?;
    let geometry = SurfaceGeometry::compute(&image, &flat)?;
    let isometry_defect = geometry
        .induced
        .iter()
        .zip(&surface_geo.induced)
        .zip(&geometry.pole)
        .filter(|(_, pole)| !**pole)
        .map(|((a, b), _)| (a - b).amax())
        .fold(0.0, f64::max);
    Ok(ComparisonReport { h0: geometry.mean_curvature.clone(), geometry, isometry_defect })
}

/// Euclidean metric on a box containing the surface image; convenient for
/// flat-slice computations.
pub fn flat_metric_for(s: &SurfaceEmbedding) -> Result<MetricField<3>> {
    let pts: Vec<Point<3>> = (0..s.domain.node_count())
        .map(|k| s.map.value(&s.domain.point(k)))
        .collect::<Result<_>>()?;
    euclidean_around(pts.into_iter())
}
