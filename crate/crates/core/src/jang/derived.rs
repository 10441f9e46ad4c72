use super::grid::{DomainKind, JangDomain};
use super::solve::JangSolution;
use crate::error::{GeoError, Result};
use crate::initial_data::{energy_density, momentum_norm, InitialDataSet};
use crate::tensor::field::{grid_gradient, grid_hessian};
use crate::tensor::{determinant, inverse, scalar_curvature_from_jet, Mat, MetricJet};
use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

/// Graph geometry of a solution at every node. Covectors are stored by
/// their coordinate components.
#[derive(Clone, Debug)]
pub struct DeformedFields {
    pub gradient_u: Vec<Vector3<f64>>,
    pub f: Vec<f64>,
    pub deformed_metric: Vec<Mat<3>>,
    pub omega: Vec<Vector3<f64>>,
    pub x: Vec<Vector3<f64>>,
}

/// `g_hat = g + du du`, `f = 1/sqrt(1 + |du|^2)`, `omega = -K(grad u)/sqrt(q)`
/// and `X = omega - d log f`, with `u` differentiated by the chart stencils.
pub fn deformed_fields(domain: &JangDomain, data: &InitialDataSet, u: &[f64]) -> Result<DeformedFields> {
    let chart = &domain.chart;
    let per_node: Vec<_> = (0..chart.node_count())
        .into_par_iter()
        .map(|k| {
            let idx = chart.multi_index(k);
            let x = chart.point(k);
            let du = Vector3::from(grid_gradient(chart, u, &idx));
            let ddu = Mat::<3>::from_fn(|a, b| grid_hessian(chart, u, &idx)[a][b]);
            let jet = data.metric.jet1(&x)?;
            let gamma = crate::tensor::christoffel_from_jet(&jet);
            let kk = data.extrinsic.value(&x)?;
            let mut hs = ddu;
            for m in 0..3 {
                hs -= gamma[m] * du[m];
            }
            let uu = jet.ginv * du;
            let q = 1.0 + du.dot(&uu);
            let sq = q.sqrt();
            let omega = -(kk * uu) / sq;
            let dlogf = -(hs * uu) / q;
            Ok((du, 1.0 / sq, jet.g + du * du.transpose(), omega, omega - dlogf))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = DeformedFields {
        gradient_u: Vec::with_capacity(per_node.len()),
        f: Vec::with_capacity(per_node.len()),
        deformed_metric: Vec::with_capacity(per_node.len()),
        omega: Vec::with_capacity(per_node.len()),
        x: Vec::with_capacity(per_node.len()),
    };
    for (du, f, gh, om, x) in per_node {
        out.gradient_u.push(du);
        out.f.push(f);
        out.deformed_metric.push(gh);
        out.omega.push(om);
        out.x.push(x);
    }
    Ok(out)
}

/// `X` of a solution as a covector field on the nodes.
pub fn jang_vector_field(sol: &JangSolution) -> &[Vector3<f64>] {
    &sol.fields.x
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarConditionReport {
    /// `min (R_hat - 2|X|^2 - 2 delta_hat X - 2(mu - |J|))` over checked nodes.
    pub min_margin: f64,
    pub worst_point: Vec<f64>,
    pub max_abs_term: f64,
    pub nodes_checked: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Nodes at least `margin` steps from every non-periodic chart edge.
pub fn deep_interior(domain: &JangDomain, margin: usize) -> Vec<usize> {
    let chart = &domain.chart;
    let n = chart.nodes();
    let per = chart.periodic();
    (0..chart.node_count())
        .filter(|k| {
            let idx = chart.multi_index(*k);
            (0..3).all(|a| per[a] || (idx[a] >= margin && idx[a] + margin < n[a]))
        })
        .collect()
}

/// Per-node `(node, value, size of largest term)` of the scalar condition
/// at `deep_interior(domain, 2)`.
pub fn scalar_condition_values(sol: &JangSolution, ids: &InitialDataSet) -> Result<Vec<(usize, f64, f64)>> {
    let domain = &sol.domain;
    let chart = &domain.chart;
    let data = domain.data(ids);
    let gh = &sol.fields.deformed_metric;
    let ghinv: Vec<Mat<3>> = gh
        .iter()
        .enumerate()
        .map(|(k, m)| inverse(m).ok_or_else(|| GeoError::SingularMetric { point: chart.point(k).iter().copied().collect() }))
        .collect::<Result<_>>()?;
    let graph_part: Vec<Mat<3>> = sol.fields.gradient_u.iter().map(|d| d * d.transpose()).collect();
    // sqrt(det g_hat) g_hat^{-1} X, whose divergence gives delta_hat X
    let flux: Vec<Vector3<f64>> =
        (0..gh.len()).map(|k| ghinv[k] * sol.fields.x[k] * determinant(&gh[k]).sqrt()).collect();
    deep_interior(domain, 2)
        .into_par_iter()
        .map(|k| {
            let idx = chart.multi_index(k);
            let x = chart.point(k);
            // exact derivatives of g plus stencil derivatives of du du
            let base = data.metric.jet2(&x)?;
            let dp = grid_gradient(chart, &graph_part, &idx);
            let ddp = grid_hessian(chart, &graph_part, &idx);
            let bdd = base.ddg.expect("second derivatives requested");
            let jet = MetricJet {
                g: gh[k],
                ginv: ghinv[k],
                dg: std::array::from_fn(|a| base.dg[a] + dp[a]),
                ddg: Some(std::array::from_fn(|a| std::array::from_fn(|b| bdd[a][b] + ddp[a][b]))),
            };
            let r_hat = scalar_curvature_from_jet(&jet);
            let xx = sol.fields.x[k];
            let x_sq = xx.dot(&(ghinv[k] * xx));
            let dflux = grid_gradient(chart, &flux, &idx);
            let div: f64 = (0..3).map(|a| dflux[a][a]).sum::<f64>() / determinant(&gh[k]).sqrt();
            let delta_x = -div;
            let mu = energy_density(&data, &x)?;
            let j = momentum_norm(&data, &x)?;
            let e = r_hat - 2.0 * x_sq - 2.0 * delta_x - 2.0 * (mu - j);
            let size = r_hat.abs().max(2.0 * x_sq).max(2.0 * delta_x.abs()).max(2.0 * (mu.abs() + j));
            Ok((k, e, size))
        })
        .collect()
}

/// Checks `R_hat - 2|X|^2 - 2 delta_hat X >= 2(mu - |J|) - tol` at nodes two
/// steps inside the grid. Derivatives of `g_hat` are the exact derivatives of
/// `g` plus stencil derivatives of `du du`, which keeps the stencil error of
/// the background curvature out of the check on curvilinear charts.
pub fn scalar_condition_check(sol: &JangSolution, ids: &InitialDataSet, tol: f64) -> Result<ScalarConditionReport> {
    let vals = scalar_condition_values(sol, ids)?;
    let (worst, min_margin) = vals.iter().fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { (v.0, v.1) } else { acc });
    let max_abs_term = vals.iter().map(|v| v.2).fold(0.0, f64::max);
    Ok(ScalarConditionReport {
        min_margin,
        worst_point: sol.domain.chart.point(worst).iter().copied().collect(),
        max_abs_term,
        nodes_checked: vals.len(),
        tolerance: tol,
        pass: !vals.is_empty() && min_margin >= -tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    /// Outer-sphere nodes as `(theta, phi)` pairs.
    pub angles: Vec<[f64; 2]>,
    /// `H_hat - g_hat(X, N_hat)` on the deformed geometry.
    pub f_direct: Vec<f64>,
    /// `H / f - sigma |du| tr_S K` for `sigma = +1` and `-1`.
    pub f_identity: [Vec<f64>; 2],
    pub sigma: Vec<i8>,
    pub mean_curvature: Vec<f64>,
    pub trace_sigma_k: Vec<f64>,
    pub norm_h: Vec<f64>,
    pub f_min: f64,
    pub norm_h_max: f64,
    /// `min (F - |H|)`.
    pub margin: f64,
    /// `max min_sigma |F_direct - F_identity(sigma)|`.
    pub route_disagreement: f64,
    pub untrapped: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundarySummary {
    #[serde(rename = "F_min")]
    pub f_min: f64,
    #[serde(rename = "|H|_max")]
    pub norm_h_max: f64,
    pub margin: f64,
    pub route_disagreement: f64,
    pub sigma_map_summary: SigmaSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaSummary {
    pub plus: usize,
    pub minus: usize,
}

impl BoundaryReport {
    pub fn summary(&self) -> BoundarySummary {
        BoundarySummary {
            f_min: self.f_min,
            norm_h_max: self.norm_h_max,
            margin: self.margin,
            route_disagreement: self.route_disagreement,
            sigma_map_summary: SigmaSummary {
                plus: self.sigma.iter().filter(|s| **s > 0).count(),
                minus: self.sigma.iter().filter(|s| **s < 0).count(),
            },
        }
    }
}

/// Mean curvature of the level sets of `r` for the metric samples `g`, with
/// the outward unit normal `N^i = g^{ir} / sqrt(g^{rr})`: `div N` at `k`.
fn level_set_mean_curvature(chart: &crate::tensor::ChartDomain<3>, g: &[Mat<3>], ginv: &[Mat<3>], k: usize) -> (f64, Vector3<f64>) {
    let v: Vec<Vector3<f64>> =
        (0..g.len()).map(|i| ginv[i].column(0).into_owned() / ginv[i][(0, 0)].sqrt() * determinant(&g[i]).sqrt()).collect();
    let idx = chart.multi_index(k);
    let dv = grid_gradient(chart, &v, &idx);
    let div = (0..3).map(|a| dv[a][a]).sum::<f64>() / determinant(&g[k]).sqrt();
    (div, ginv[k].column(0).into_owned() / ginv[k][(0, 0)].sqrt())
}

/// Boundary function `F` on the outer sphere of a ball solve, computed on
/// the deformed geometry and through the `sigma` identity.
pub fn boundary_function_f(sol: &JangSolution, ids: &InitialDataSet) -> Result<BoundaryReport> {
    if !sol.converged {
        return Err(GeoError::NotConverged(format!(
            "Jang residual {:e} above tolerance {:e}",
            sol.residual_norm, sol.tolerance
        )));
    }
    if !matches!(sol.domain.kind, DomainKind::Ball { .. }) {
        return Err(GeoError::Unsupported("boundary function needs a ball domain with a smooth outer sphere".into()));
    }
    let chart = &sol.domain.chart;
    let n = chart.nodes();
    let data = sol.domain.data(ids);
    // Only the outer layers enter one-sided radial stencils.
    let layer = |k: usize| chart.multi_index(k)[0] + 4 >= n[0];
    let mut g = vec![Mat::<3>::identity(); chart.node_count()];
    let mut ginv = g.clone();
    let gh = &sol.fields.deformed_metric;
    let mut ghinv = g.clone();
    for k in (0..chart.node_count()).filter(|k| layer(*k)) {
        let x = chart.point(k);
        g[k] = data.metric.value(&x)?;
        ginv[k] = inverse(&g[k]).ok_or_else(|| GeoError::SingularMetric { point: x.iter().copied().collect() })?;
        ghinv[k] = inverse(&gh[k]).ok_or_else(|| GeoError::SingularMetric { point: x.iter().copied().collect() })?;
    }
    let mut rep = BoundaryReport {
        angles: Vec::new(),
        f_direct: Vec::new(),
        f_identity: [Vec::new(), Vec::new()],
        sigma: Vec::new(),
        mean_curvature: Vec::new(),
        trace_sigma_k: Vec::new(),
        norm_h: Vec::new(),
        f_min: f64::INFINITY,
        norm_h_max: 0.0,
        margin: f64::INFINITY,
        route_disagreement: 0.0,
        untrapped: true,
    };
    for j in 0..n[1] {
        for l in 0..n[2] {
            let k = chart.linear_index(&[n[0] - 1, j, l]);
            let x = chart.point(k);
            let (h_hat, n_hat) = level_set_mean_curvature(chart, gh, &ghinv, k);
            let f_a = h_hat - sol.fields.x[k].dot(&n_hat);
            let (h, nn) = level_set_mean_curvature(chart, &g, &ginv, k);
            let kk = data.extrinsic.value(&x)?;
            let tr_s = (ginv[k] * kk).trace() - nn.dot(&(kk * nn));
            let du = sol.fields.gradient_u[k];
            let grad = du.dot(&(ginv[k] * du)).sqrt();
            let q = 1.0 + grad * grad;
            let fb = [q.sqrt() * h - grad * tr_s, q.sqrt() * h + grad * tr_s];
            let sigma: i8 = if (f_a - fb[0]).abs() <= (f_a - fb[1]).abs() { 1 } else { -1 };
            let disc = h * h - tr_s * tr_s;
            if disc <= 0.0 {
                rep.untrapped = false;
            }
            let norm_h = disc.max(0.0).sqrt();
            rep.angles.push([x[1], x[2]]);
            rep.route_disagreement = rep.route_disagreement.max((f_a - fb[0]).abs().min((f_a - fb[1]).abs()));
            rep.f_min = rep.f_min.min(f_a);
            rep.norm_h_max = rep.norm_h_max.max(norm_h);
            rep.margin = rep.margin.min(f_a - norm_h);
            rep.f_direct.push(f_a);
            rep.f_identity[0].push(fb[0]);
            rep.f_identity[1].push(fb[1]);
            rep.sigma.push(sigma);
            rep.mean_curvature.push(h);
            rep.trace_sigma_k.push(tr_s);
            rep.norm_h.push(norm_h);
        }
    }
    Ok(rep)
}
