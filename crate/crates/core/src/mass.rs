//! Quasi-local masses (Brown-York, Lam and the `H0^2/H` mass) and Liu-Yau
//! type integral inequalities.

use crate::error::{GeoError, Result};
use crate::initial_data::InitialDataSet;
use crate::surface::families::coordinate_sphere;
use crate::surface::{
    comparison_h0, null_expansions, trace_sigma_k, ComparisonReport, EuclideanImmersion, NullExpansionField, SurfaceEmbedding,
    SurfaceGeometry, Vec3,
};
use crate::tensor::ChartDomain;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative floor below which a denominator counts as vanishing.
const DENOM_FLOOR: f64 = 1e-10;

fn weighted_scale(geo: &SurfaceGeometry, fields: &[&[f64]]) -> f64 {
    let mut s: f64 = 0.0;
    for f in fields {
        for (v, w) in f.iter().zip(&geo.weights) {
            if *w > 0.0 {
                s = s.max(v.abs());
            }
        }
    }
    s
}

fn require_positive(geo: &SurfaceGeometry, f: &[f64], scale: f64, what: &str) -> Result<()> {
    let bad = f.iter().zip(&geo.weights).any(|(v, w)| *w > 0.0 && !(*v > DENOM_FLOOR * scale));
    if bad {
        Err(GeoError::NonPositive { what: what.into() })
    } else {
        Ok(())
    }
}

fn integrate_where_weighted(geo: &SurfaceGeometry, f: impl Fn(usize) -> f64) -> f64 {
    let vals: Vec<f64> = (0..geo.len()).map(|i| if geo.weights[i] > 0.0 { f(i) } else { 0.0 }).collect();
    geo.integrate(&vals)
}

/// `(1/8 pi) int (H0 - H)`.
pub fn brown_york(geo: &SurfaceGeometry, h: &[f64], h0: &[f64]) -> f64 {
    integrate_where_weighted(geo, |i| h0[i] - h[i]) / (8.0 * PI)
}

/// `(1/16 pi) int (H0^2 - H^2) / H0`; requires `H0 > 0`.
pub fn lam_mass(geo: &SurfaceGeometry, h: &[f64], h0: &[f64]) -> Result<f64> {
    require_positive(geo, h0, weighted_scale(geo, &[h, h0]), "comparison mean curvature H0")?;
    Ok(integrate_where_weighted(geo, |i| (h0[i] * h0[i] - h[i] * h[i]) / h0[i]) / (16.0 * PI))
}

/// `(1/16 pi) int (H0^2 - H^2) / H`; requires `H > 0`.
pub fn hmr_mass(geo: &SurfaceGeometry, h: &[f64], h0: &[f64]) -> Result<f64> {
    require_positive(geo, h, weighted_scale(geo, &[h, h0]), "mean curvature H")?;
    Ok(integrate_where_weighted(geo, |i| (h0[i] * h0[i] - h[i] * h[i]) / h[i]) / (16.0 * PI))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LiuYauMargins {
    /// `int H0 - int |H|`
    pub classic_margin: f64,
    /// `int H0^2/|H| - int |H|`
    pub hmr_margin: f64,
    /// `classic_margin >= 0` implies `hmr_margin >= 0` (up to `tol`).
    pub implication_holds: bool,
}

/// Both integral inequalities; the mean curvature vector must be spacelike.
pub fn liu_yau_checks(geo: &SurfaceGeometry, n: &NullExpansionField, h0: &[f64]) -> Result<LiuYauMargins> {
    let scale = weighted_scale(geo, &[&n.mean_curvature, &n.trace_sigma_k, h0]);
    let count = n
        .norm_h_sq
        .iter()
        .zip(&geo.weights)
        .filter(|(q, w)| **w > 0.0 && !(**q > (DENOM_FLOOR * scale).powi(2)))
        .count();
    if count > 0 {
        return Err(GeoError::ZeroNormMeanCurvature { count });
    }
    let norm = |i: usize| n.norm_h_sq[i].sqrt();
    let int_h0 = integrate_where_weighted(geo, |i| h0[i]);
    let int_norm = integrate_where_weighted(geo, norm);
    let int_ratio = integrate_where_weighted(geo, |i| h0[i] * h0[i] / norm(i));
    let classic_margin = int_h0 - int_norm;
    let hmr_margin = int_ratio - int_norm;
    let tol = 1e-12 * geo.area() * scale;
    Ok(LiuYauMargins { classic_margin, hmr_margin, implication_holds: classic_margin < -tol || hmr_margin >= -tol })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InputsSummary {
    pub area: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub h0_min: f64,
    pub h0_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MassReport {
    pub m_by: f64,
    /// Absent when `H0` is not positive.
    pub m_l: Option<f64>,
    /// Absent when `H` is not positive.
    pub m_hmr: Option<f64>,
    pub liu_yau_margin: Option<f64>,
    pub hmr_margin: Option<f64>,
    pub implication_holds: Option<bool>,
    pub inputs_summary: InputsSummary,
}

/// All masses and margins that are defined for the given fields.
pub fn mass_report(geo: &SurfaceGeometry, n: &NullExpansionField, h0: &[f64]) -> MassReport {
    let h = &n.mean_curvature;
    let margins = liu_yau_checks(geo, n, h0).ok();
    let (h_min, h_max) = geo.scan_range(h);
    let (h0_min, h0_max) = geo.scan_range(h0);
    MassReport {
        m_by: brown_york(geo, h, h0),
        m_l: lam_mass(geo, h, h0).ok(),
        m_hmr: hmr_mass(geo, h, h0).ok(),
        liu_yau_margin: margins.map(|m| m.classic_margin),
        hmr_margin: margins.map(|m| m.hmr_margin),
        implication_holds: margins.map(|m| m.implication_holds),
        inputs_summary: InputsSummary { area: geo.area(), h_min, h_max, h0_min, h0_max },
    }
}

/// Surface geometry, expansions and comparison data for one surface.
#[derive(Clone, Debug)]
pub struct SurfaceEvaluation {
    pub geometry: SurfaceGeometry,
    pub expansions: NullExpansionField,
    pub comparison: ComparisonReport,
    pub masses: MassReport,
}

pub fn evaluate_surface(ids: &InitialDataSet, s: &SurfaceEmbedding, e: &EuclideanImmersion) -> Result<SurfaceEvaluation> {
    let geometry = SurfaceGeometry::compute(s, &ids.metric)?;
    let tr = trace_sigma_k(&geometry, &ids.extrinsic)?;
    let expansions = null_expansions(&geometry, &geometry.mean_curvature, &tr);
    let comparison = comparison_h0(e, s, &geometry)?;
    let masses = mass_report(&geometry, &expansions, &comparison.h0);
    Ok(SurfaceEvaluation { geometry, expansions, comparison, masses })
}

/// One row of a mass-versus-radius table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub m_by: f64,
    pub m_l: f64,
    pub m_hmr: f64,
    pub closed_form: f64,
    pub rel_err: f64,
}

/// Quadrature masses of the coordinate spheres `|x| = r` of the Schwarzschild
/// slice on `(n + 1) x n` grids, against the round sphere of equal area.
pub fn schwarzschild_profile(mass: f64, radii: &[f64], n: usize) -> Result<Vec<ProfileRow>> {
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.5 * mass) {
                return Err(GeoError::Infeasible(format!("radius {r} is inside the horizon r = M/2")));
            }
            let chart = ChartDomain::closed([-2.0 * r; 3], [2.0 * r; 3], [3; 3])?;
            let ids = InitialDataSet::schwarzschild(mass, chart);
            let s = coordinate_sphere(Vec3::zeros(), r, n + 1, n)?;
            let e = EuclideanImmersion::round_sphere(&s.domain, schwarzschild::areal_radius(mass, r));
            let ev = evaluate_surface(&ids, &s, &e)?;
            let h = &ev.expansions.mean_curvature;
            let m_hmr = hmr_mass(&ev.geometry, h, &ev.comparison.h0)?;
            let closed_form = schwarzschild::hmr(mass, r);
            Ok(ProfileRow {
                r,
                m_by: brown_york(&ev.geometry, h, &ev.comparison.h0),
                m_l: lam_mass(&ev.geometry, h, &ev.comparison.h0)?,
                m_hmr,
                closed_form,
                rel_err: (m_hmr - closed_form).abs() / closed_form.abs(),
            })
        })
        .collect()
}

/// Closed forms on coordinate spheres `|x| = r` of the isotropic
/// Schwarzschild slice of mass `m`, compared with the round sphere of the
/// same area.
pub mod schwarzschild {
    fn conformal_factor(m: f64, r: f64) -> f64 {
        1.0 + m / (2.0 * r)
    }

    pub fn hmr(m: f64, r: f64) -> f64 {
        m * (r + 0.5 * m) / (r - 0.5 * m)
    }

    pub fn brown_york(m: f64, r: f64) -> f64 {
        m * conformal_factor(m, r)
    }

    pub fn lam(m: f64, _r: f64) -> f64 {
        m
    }

    /// Mean curvature of the coordinate sphere and of its round comparison
    /// sphere of radius `r u^2`.
    pub fn mean_curvatures(m: f64, r: f64) -> (f64, f64) {
        let u = conformal_factor(m, r);
        let du = -m / (2.0 * r * r);
        ((2.0 / r + 4.0 * du / u) / (u * u), 2.0 / (r * u * u))
    }

    /// Areal radius `r u^2`.
    pub fn areal_radius(m: f64, r: f64) -> f64 {
        r * conformal_factor(m, r).powi(2)
    }
}
