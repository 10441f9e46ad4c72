use super::clifford::{inner, norm_sq, CliffordRep, Spinor};
use super::field::{PolynomialSpinor, SpinorField};
use crate::error::{GeoError, Result};
use crate::surface::families::coordinate_sphere;
use crate::surface::{SurfaceEmbedding, SurfaceGeometry, Vec3};
use crate::tensor::field::grid_gradient;
use crate::tensor::{inverse, quadrature_weights, ChartDomain, Mat, MetricField};
use num_complex::Complex64;
use serde::Serialize;

fn require_flat(geo: &SurfaceGeometry) -> Result<()> {
    if geo.ambient.iter().any(|g| (g - Mat::<3>::identity()).amax() > 1e-12) {
        return Err(GeoError::Unsupported("extrinsic Dirac operator needs a flat ambient metric".into()));
    }
    Ok(())
}

/// `D psi = H psi / 2 - gamma(N) sum_j gamma(e_j) nabla_{e_j} psi` from node
/// samples of `psi` along the surface, differentiated with the parameter-grid
/// stencils. Pole nodes return zero.
pub fn extrinsic_dirac_samples(s: &SurfaceEmbedding, geo: &SurfaceGeometry, rep: &CliffordRep, samples: &[Spinor]) -> Result<Vec<Spinor>> {
    require_flat(geo)?;
    let dom = &s.domain;
    (0..geo.len())
        .map(|k| {
            if geo.pole[k] {
                return Ok(Spinor::zeros());
            }
            let idx = dom.multi_index(k);
            let dpsi = grid_gradient(dom, samples, &idx);
            let ginv = inverse(&geo.induced[k]).ok_or_else(|| GeoError::DegenerateImmersion {
                param: dom.point(k).iter().copied().collect(),
            })?;
            let e = geo.tangents[k];
            let mut sum = Spinor::zeros();
            for a in 0..2 {
                let ga = rep.gamma(&e[a]);
                for b in 0..2 {
                    sum += ga * dpsi[b] * Complex64::from(ginv[(a, b)]);
                }
            }
            let gn = rep.gamma(&geo.normal[k]);
            Ok(samples[k] * Complex64::from(0.5 * geo.mean_curvature[k]) - gn * sum)
        })
        .collect()
}

pub fn extrinsic_dirac_on_surface(s: &SurfaceEmbedding, geo: &SurfaceGeometry, rep: &CliffordRep, psi: &dyn SpinorField) -> Result<Vec<Spinor>> {
    let samples: Vec<Spinor> = geo.positions.iter().map(|x| psi.value(x)).collect();
    extrinsic_dirac_samples(s, geo, rep, &samples)
}

/// Sup over scanned nodes of `|D psi0 - h0/2 psi0|` for a constant unit spinor.
pub fn parallel_spinor_defect(s: &SurfaceEmbedding, geo: &SurfaceGeometry, rep: &CliffordRep, psi0: Spinor, h0: &[f64]) -> Result<f64> {
    let psi0 = psi0 / Complex64::from(psi0.norm());
    let d = extrinsic_dirac_on_surface(s, geo, rep, &PolynomialSpinor::constant(psi0))?;
    Ok((0..geo.len())
        .filter(|k| geo.scan_mask[*k] && !geo.pole[*k])
        .map(|k| (d[k] - psi0 * Complex64::from(0.5 * h0[k])).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReillyReport {
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
}

/// Both sides of the integrated Schroedinger-Lichnerowicz formula on the flat
/// ball of the given radius:
/// `int_S (<D psi, psi> - H/2 |psi|^2) = int_B (|nabla psi|^2 - |D psi|^2)`.
///
/// The boundary sphere is sampled on a `(n+1) x 2n` grid with stencil
/// derivatives; the volume side uses exact derivatives of the polynomial
/// field on an `(n+1)^2 x 2n` spherical grid.
pub fn reilly_identity_flat_ball(rep: &CliffordRep, psi: &PolynomialSpinor, radius: f64, n: usize) -> Result<ReillyReport> {
    let s = coordinate_sphere(Vec3::zeros(), radius, n + 1, 2 * n)?.sampled()?;
    let flat = MetricField::euclidean(ChartDomain::closed([-2.0 * radius; 3], [2.0 * radius; 3], [3; 3])?);
    let geo = SurfaceGeometry::compute(&s, &flat)?;
    let d = extrinsic_dirac_on_surface(&s, &geo, rep, psi)?;
    let integrand: Vec<f64> = (0..geo.len())
        .map(|k| {
            let v = psi.value(&geo.positions[k]);
            inner(&d[k], &v).re - 0.5 * geo.mean_curvature[k] * norm_sq(&v)
        })
        .collect();
    let lhs = geo.integrate(&integrand);

    let ball = ChartDomain::new(
        [0.0, 0.0, 0.0],
        [radius, std::f64::consts::PI, std::f64::consts::TAU],
        [n + 1, n + 1, 2 * n],
        [false, false, true],
    )?;
    let w = quadrature_weights(&ball);
    let terms: Vec<f64> = (0..ball.node_count())
        .map(|k| {
            let y = ball.point(k);
            let (st, ct) = y[1].sin_cos();
            let (sp, cp) = y[2].sin_cos();
            let dens = y[0] * y[0] * st;
            if w[k] * dens == 0.0 {
                return 0.0;
            }
            let x = Vec3::new(st * cp, st * sp, ct) * y[0];
            let g = psi.gradient(&x);
            let grad_sq: f64 = g.iter().map(norm_sq).sum();
            w[k] * dens * (grad_sq - norm_sq(&psi.dirac(rep, &x)))
        })
        .collect();
    let rhs = crate::tensor::pairwise_sum(&terms);
    Ok(ReillyReport { lhs, rhs, defect: (lhs - rhs).abs() })
}
