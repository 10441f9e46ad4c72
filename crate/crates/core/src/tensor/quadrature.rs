use super::chart::ChartDomain;
use super::linalg::pairwise_sum;
use crate::error::{GeoError, Result};

/// One-dimensional node weights.
///
/// Periodic axes use the rectangle rule. Closed axes with at least eight nodes
/// use the trapezoid rule with fourth-order end corrections
/// (17/48, 59/48, 43/48, 49/48 at each end); shorter axes use the plain
/// trapezoid rule. All weights are positive.
pub fn weights_1d(n: usize, h: f64, periodic: bool) -> Vec<f64> {
    if periodic {
        return vec![h; n];
    }
    let mut w = vec![h; n];
    if n >= 8 {
        let ends = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];
        for (k, e) in ends.iter().enumerate() {
            w[k] = e * h;
            w[n - 1 - k] = e * h;
        }
    } else {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Tensor-product weights for every node of `domain`.
pub fn quadrature_weights<const D: usize>(domain: &ChartDomain<D>) -> Vec<f64> {
    let axes: Vec<Vec<f64>> = (0..D)
        .map(|a| weights_1d(domain.nodes()[a], domain.spacing(a), domain.periodic()[a]))
        .collect();
    (0..domain.node_count())
        .map(|k| {
            let idx = domain.multi_index(k);
            (0..D).map(|a| axes[a][idx[a]]).product()
        })
        .collect()
}

/// Integral of node samples against an optional density (for instance an
/// area or volume element).
pub fn integrate<const D: usize>(domain: &ChartDomain<D>, values: &[f64], density: Option<&[f64]>) -> Result<f64> {
    let n = domain.node_count();
    if values.len() != n || density.is_some_and(|d| d.len() != n) {
        return Err(GeoError::InvalidData("sample count does not match chart nodes".into()));
    }
    let w = quadrature_weights(domain);
    let terms: Vec<f64> = (0..n)
        .map(|k| {
            let d = density.map_or(1.0, |d| d[k]);
            if w[k] * d == 0.0 {
                0.0
            } else {
                w[k] * d * values[k]
            }
        })
        .collect();
    Ok(pairwise_sum(&terms))
}
