use super::derived::{deformed_fields, DeformedFields};
use super::grid::JangDomain;
use super::linear::bicgstab;
use super::problem::JangProblem;
use crate::error::{GeoError, Result};
use crate::initial_data::InitialDataSet;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JangOptions {
    pub max_newton: usize,
    /// Backtracking factor of the Armijo line search.
    pub damping: f64,
    pub continuation_steps: usize,
    /// Sup-norm residual tolerance; `None` means `1e-8` times the problem
    /// scale `max(max |K|_g, 1 / diameter)`.
    pub tol: Option<f64>,
    pub linear_rtol: f64,
    pub blow_up_cap: f64,
}

impl Default for JangOptions {
    fn default() -> Self {
        JangOptions { max_newton: 30, damping: 0.5, continuation_steps: 4, tol: None, linear_rtol: 1e-11, blow_up_cap: 1e6 }
    }
}

const STEP_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

#[derive(Clone, Debug)]
pub struct JangSolution {
    pub domain: JangDomain,
    pub u: Vec<f64>,
    pub fields: DeformedFields,
    pub residual_norm: f64,
    pub tolerance: f64,
    pub scale: f64,
    pub converged: bool,
    /// Newton steps (linear solves) summed over continuation levels.
    pub iterations: usize,
    pub continuation_iterations: Vec<usize>,
}

fn l2(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Problem scale `max(max |K|_g, 1 / diameter)`.
pub fn problem_scale(p: &JangProblem) -> f64 {
    let kmax = p
        .nodes
        .iter()
        .map(|n| {
            let m = n.ginv * n.k;
            (m * m).trace().abs().sqrt()
        })
        .fold(0.0, f64::max);
    kmax.max(1.0 / p.domain.diameter())
}

fn newton_level(p: &JangProblem, u: &mut [f64], s: f64, tol: f64, opts: &JangOptions) -> Result<usize> {
    let mut r = p.residual(u, s);
    let mut steps = 0;
    while p.interior_norm(&r) >= tol {
        if steps == opts.max_newton {
            return Err(GeoError::NotConverged(format!(
                "Newton stalled at continuation s = {s} after {steps} steps, residual {:e}",
                p.interior_norm(&r)
            )));
        }
        let jac = p.jacobian(u, s);
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let (du, stats) = bicgstab(&jac, &rhs, opts.linear_rtol, 4000)?;
        if stats.relative_residual > 1e-4 {
            return Err(GeoError::SingularJacobian(format!(
                "linear solve reached only {:e} relative residual",
                stats.relative_residual
            )));
        }
        steps += 1;
        let base = l2(&r);
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + alpha * b).collect();
            let rt = p.residual(&trial, s);
            let norm = l2(&rt);
            if norm.is_finite() && norm <= (1.0 - 1e-4 * alpha) * base {
                u.copy_from_slice(&trial);
                r = rt;
                break;
            }
            alpha *= opts.damping;
            if alpha < STEP_FLOOR {
                return Err(GeoError::NewtonDiverged(format!(
                    "line search below 2^-20 at s = {s}, residual {:e}",
                    p.interior_norm(&r)
                )));
            }
        }
        let (node, grad) = p.max_gradient(u);
        if !(grad <= opts.blow_up_cap) {
            return Err(GeoError::BlowUpSuspected {
                node,
                gradient: grad,
            });
        }
    }
    Ok(steps)
}

/// Damped Newton with continuation `K -> s K`, `s = 1/n, 2/n, ..., 1`,
/// from `u = 0`.
pub fn solve_jang(domain: JangDomain, ids: &InitialDataSet, opts: &JangOptions) -> Result<JangSolution> {
    let p = JangProblem::new(domain, ids)?;
    solve_problem(&p, ids, opts)
}

pub fn solve_problem(p: &JangProblem, ids: &InitialDataSet, opts: &JangOptions) -> Result<JangSolution> {
    let scale = problem_scale(p);
    let tol = opts.tol.unwrap_or(1e-8 * scale);
    let levels = opts.continuation_steps.max(1);
    let mut u = vec![0.0; p.len()];
    let mut per_level = Vec::with_capacity(levels);
    for j in 1..=levels {
        let s = j as f64 / levels as f64;
        per_level.push(newton_level(p, &mut u, s, tol, opts)?);
    }
    let residual_norm = p.interior_norm(&p.residual(&u, 1.0));
    let fields = deformed_fields(&p.domain, &p.domain.data(ids), &u)?;
    Ok(JangSolution {
        domain: p.domain.clone(),
        u,
        fields,
        residual_norm,
        tolerance: tol,
        scale,
        converged: residual_norm < tol,
        iterations: per_level.iter().sum(),
        continuation_iterations: per_level,
    })
}
