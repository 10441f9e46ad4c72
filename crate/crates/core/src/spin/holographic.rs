use super::clifford::{norm_sq, CliffordRep, Spinor};
use super::dirac::extrinsic_dirac_on_surface;
use super::field::{PolynomialSpinor, SpinorField};
use crate::error::{GeoError, Result};
use crate::surface::{SurfaceEmbedding, SurfaceGeometry};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct HolographicReport {
    pub values: Vec<f64>,
    pub minimum: f64,
    /// Scale used for relative comparisons: `int (|H|/4) |phi|^2` of the
    /// minimizing spinor.
    pub scale: f64,
}

/// Evaluates `int (1/|H|) |D phi|^2 - (|H|/4) |phi|^2` for each test spinor,
/// with `D` the extrinsic Dirac operator of the flat-space surface `s` and
/// `weight` the norm of the mean curvature vector at each node.
pub fn holographic_inequality_check(
    s: &SurfaceEmbedding,
    geo: &SurfaceGeometry,
    rep: &CliffordRep,
    test_spinors: &[PolynomialSpinor],
    weight: &[f64],
) -> Result<HolographicReport> {
    let wscale = weight.iter().zip(&geo.weights).filter(|(_, w)| **w > 0.0).map(|(v, _)| v.abs()).fold(0.0, f64::max);
    let bad = weight.iter().zip(&geo.weights).filter(|(v, w)| **w > 0.0 && !(**v > 1e-10 * wscale)).count();
    if bad > 0 || wscale == 0.0 {
        return Err(GeoError::ZeroNormMeanCurvature { count: bad.max(1) });
    }
    let mut values = Vec::with_capacity(test_spinors.len());
    let mut scales = Vec::with_capacity(test_spinors.len());
    for phi in test_spinors {
        let d = extrinsic_dirac_on_surface(s, geo, rep, phi)?;
        let samples: Vec<Spinor> = geo.positions.iter().map(|x| phi.value(x)).collect();
        let kinetic: Vec<f64> = (0..geo.len()).map(|k| if geo.pole[k] { 0.0 } else { norm_sq(&d[k]) / weight[k] }).collect();
        let potential: Vec<f64> = (0..geo.len()).map(|k| 0.25 * weight[k] * norm_sq(&samples[k])).collect();
        let p = geo.integrate(&potential);
        values.push(geo.integrate(&kinetic) - p);
        scales.push(p);
    }
    let (imin, minimum) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    Ok(HolographicReport { values, minimum, scale: scales.get(imin).copied().unwrap_or(0.0) })
}

/// Restricted constants, Clifford-linear fields and `random` band-limited
/// polynomial spinors scaled to a surface of size `scale`.
pub fn standard_test_spinors(rep: &CliffordRep, random: usize, scale: f64, seed: u64) -> Vec<PolynomialSpinor> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let consts = [
        Spinor::new(c(1.0, 0.0), c(0.0, 0.0)),
        Spinor::new(c(0.0, 0.0), c(1.0, 0.0)),
        Spinor::new(c(0.6, 0.0), c(0.0, 0.8)),
    ];
    let mut out: Vec<PolynomialSpinor> = consts.iter().map(|p| PolynomialSpinor::constant(*p)).collect();
    for p in consts {
        let mut f = PolynomialSpinor::clifford_linear(rep, p);
        for t in f.terms.iter_mut() {
            t.1 /= Complex64::from(scale);
        }
        out.push(f);
    }
    out.extend((0..random).map(|i| PolynomialSpinor::random(seed.wrapping_add(i as u64), 3, scale)));
    out
}
