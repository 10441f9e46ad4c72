use super::comparison::ComparisonReport;
use super::expansions::{classify, dichotomy_check, CausalClass, ClassCounts, Dichotomy, NullExpansionField};
use super::geometry::SurfaceGeometry;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct SurfaceReport {
    pub label: String,
    pub area: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub trk_min: f64,
    pub trk_max: f64,
    pub theta_plus_min: f64,
    pub theta_plus_max: f64,
    pub theta_minus_min: f64,
    pub theta_minus_max: f64,
    pub norm_h_sq_min: f64,
    pub norm_h_sq_max: f64,
    pub classification: CausalClass,
    pub counts: ClassCounts,
    /// Present only for untrapped surfaces.
    pub dichotomy: Option<Dichotomy>,
    pub h0_min: Option<f64>,
    pub h0_max: Option<f64>,
    pub isometry_defect: Option<f64>,
}

pub fn surface_report(
    label: &str,
    geo: &SurfaceGeometry,
    n: &NullExpansionField,
    tol: f64,
    comparison: Option<&ComparisonReport>,
) -> SurfaceReport {
    let (h_min, h_max) = geo.scan_range(&n.mean_curvature);
    let (trk_min, trk_max) = geo.scan_range(&n.trace_sigma_k);
    let (theta_plus_min, theta_plus_max) = geo.scan_range(&n.theta_plus);
    let (theta_minus_min, theta_minus_max) = geo.scan_range(&n.theta_minus);
    let (norm_h_sq_min, norm_h_sq_max) = geo.scan_range(&n.norm_h_sq);
    let c = classify(n, tol);
    let dichotomy = (c.label == CausalClass::Untrapped).then(|| dichotomy_check(&n.mean_curvature, &n.mask, tol));
    let h0 = comparison.map(|cmp| geo.scan_range(&cmp.h0));
    SurfaceReport {
        label: label.to_string(),
        area: geo.area(),
        h_min,
        h_max,
        trk_min,
        trk_max,
        theta_plus_min,
        theta_plus_max,
        theta_minus_min,
        theta_minus_max,
        norm_h_sq_min,
        norm_h_sq_max,
        classification: c.label,
        counts: c.counts,
        dichotomy,
        h0_min: h0.map(|r| r.0),
        h0_max: h0.map(|r| r.1),
        isometry_defect: comparison.map(|cmp| cmp.isometry_defect),
    }
}
