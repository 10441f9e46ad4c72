use super::chart::Point;
use super::field::Field;
use super::linalg::Mat;
use super::metric::{MetricField, MetricJet};
use crate::error::Result;

/// Christoffel symbols `gamma[k][(i, j)]` of the second kind.
pub type Christoffel<const D: usize> = [Mat<D>; D];

fn first_kind<const D: usize>(dg: &[Mat<D>; D]) -> [Mat<D>; D] {
    std::array::from_fn(|l| Mat::<D>::from_fn(|i, j| 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])))
}

fn raise<const D: usize>(ginv: &Mat<D>, low: &[Mat<D>; D]) -> Christoffel<D> {
    std::array::from_fn(|k| {
        let mut m = Mat::<D>::zeros();
        for l in 0..D {
            m += low[l] * ginv[(k, l)];
        }
        m
    })
}

pub fn christoffel_from_jet<const D: usize>(jet: &MetricJet<D>) -> Christoffel<D> {
    raise(&jet.ginv, &first_kind(&jet.dg))
}

pub fn christoffel<const D: usize>(metric: &MetricField<D>, x: &Point<D>) -> Result<Christoffel<D>> {
    Ok(christoffel_from_jet(&metric.jet1(x)?))
}

/// Scalar curvature from a second-order metric jet. Panics if the jet lacks
/// second derivatives.
pub fn scalar_curvature_from_jet<const D: usize>(jet: &MetricJet<D>) -> f64 {
    let ddg = jet.ddg.as_ref().expect("second derivatives required");
    let low = first_kind(&jet.dg);
    let gam = raise(&jet.ginv, &low);
    // d_m Gamma^k_ij
    let dgam: [Christoffel<D>; D] = std::array::from_fn(|m| {
        let dginv = -(jet.ginv * jet.dg[m] * jet.ginv);
        let dlow: [Mat<D>; D] = std::array::from_fn(|l| {
            Mat::<D>::from_fn(|i, j| 0.5 * (ddg[m][i][(j, l)] + ddg[m][j][(i, l)] - ddg[m][l][(i, j)]))
        });
        let a = raise(&dginv, &low);
        let b = raise(&jet.ginv, &dlow);
        std::array::from_fn(|k| a[k] + b[k])
    });
    let mut r = 0.0;
    for i in 0..D {
        for j in 0..D {
            let gij = jet.ginv[(i, j)];
            if gij == 0.0 {
                continue;
            }
            let mut ric = 0.0;
            for k in 0..D {
                ric += dgam[k][k][(i, j)] - dgam[j][k][(i, k)];
                for l in 0..D {
                    ric += gam[k][(k, l)] * gam[l][(i, j)] - gam[k][(j, l)] * gam[l][(i, k)];
                }
            }
            r += gij * ric;
        }
    }
    r
}

pub fn scalar_curvature<const D: usize>(metric: &MetricField<D>, x: &Point<D>) -> Result<f64> {
    Ok(scalar_curvature_from_jet(&metric.jet2(x)?))
}

/// Negative divergence of a vector field, `-(d_i X^i + Gamma^k_ki X^i)`.
pub fn divergence_neg<const D: usize>(metric: &MetricField<D>, v: &dyn Field<D, Point<D>>, x: &Point<D>) -> Result<f64> {
    let jet = metric.jet1(x)?;
    let val = v.value(x)?;
    let grad = v.gradient(x)?;
    let mut div = 0.0;
    for i in 0..D {
        div += grad[i][i];
        // Gamma^k_ki = 1/2 g^{kl} d_i g_kl
        div += 0.5 * (jet.ginv.component_mul(&jet.dg[i])).sum() * val[i];
    }
    Ok(-div)
}

/// Negative divergence of a symmetric (0,2)-tensor, `-(g^{ik} nabla_k T_ij)`,
/// returned as a covector.
pub fn divergence_neg_tensor<const D: usize>(metric: &MetricField<D>, t: &dyn Field<D, Mat<D>>, x: &Point<D>) -> Result<Point<D>> {
    let jet = metric.jet1(x)?;
    let gam = christoffel_from_jet(&jet);
    let tv = t.value(x)?;
    let dt = t.gradient(x)?;
    Ok(Point::<D>::from_fn(|j, _| {
        let mut s = 0.0;
        for i in 0..D {
            for k in 0..D {
                let gik = jet.ginv[(i, k)];
                if gik == 0.0 {
                    continue;
                }
                let mut cov = dt[k][(i, j)];
                for l in 0..D {
                    cov -= gam[l][(k, i)] * tv[(l, j)] + gam[l][(k, j)] * tv[(i, l)];
                }
                s += gik * cov;
            }
        }
        -s
    }))
}
