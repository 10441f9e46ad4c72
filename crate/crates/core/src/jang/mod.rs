//! The Jang equation with zero Dirichlet data: discretization, damped Newton
//! solver and the deformed geometry of the solution graph.

pub mod derived;
pub mod grid;
pub mod linear;
pub mod problem;
pub mod solve;

pub use derived::{
    boundary_function_f, deep_interior, deformed_fields, jang_vector_field, scalar_condition_check, scalar_condition_values,
    BoundaryReport, BoundarySummary, DeformedFields, ScalarConditionReport,
};
pub use grid::{DomainKind, JangDomain};
pub use problem::{jang_local, JangProblem, NodeData};
pub use solve::{problem_scale, solve_jang, solve_problem, JangOptions, JangSolution};

use crate::error::Result;
use crate::initial_data::InitialDataSet;
use crate::tensor::{christoffel_from_jet, Field, Mat, Point};
use nalgebra::Vector3;

/// Jang residual at a point for a twice differentiable `u`:
/// `(g^ij - u^i u^j / q) (Hess_ij u / sqrt(q) - K_ij)`, `q = 1 + |du|^2`.
pub fn jang_residual(u: &dyn Field<3, f64>, ids: &InitialDataSet, x: &Point<3>) -> Result<f64> {
    let jet = ids.metric.jet1(x)?;
    let k = ids.extrinsic.value(x)?;
    let node = NodeData { g: jet.g, ginv: jet.ginv, gamma: christoffel_from_jet(&jet), k };
    let du = Vector3::from(u.gradient(x)?);
    let h = u.hessian(x)?;
    let ddu = Mat::<3>::from_fn(|a, b| h[a][b]);
    Ok(jang_local(&node, &du, &ddu, 1.0).residual)
}

/// Solution dump: `{chart, u, f, residual_norm, iterations}`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SolutionDump<'a> {
    pub chart: &'a crate::tensor::ChartDomain<3>,
    pub u: &'a [f64],
    pub f: &'a [f64],
    pub residual_norm: f64,
    pub iterations: usize,
}

impl JangSolution {
    pub fn dump(&self) -> SolutionDump<'_> {
        SolutionDump { chart: &self.domain.chart, u: &self.u, f: &self.fields.f, residual_norm: self.residual_norm, iterations: self.iterations }
    }

    /// Little-endian binary snapshot: magic `GJNG`, version, node counts,
    /// bounds, residual norm, iterations, then `u` and `f`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.domain.chart;
        let mut b = Vec::with_capacity(64 + 16 * self.u.len());
        b.extend_from_slice(b"GJNG");
        b.extend_from_slice(&1u32.to_le_bytes());
        for n in c.nodes() {
            b.extend_from_slice(&(n as u64).to_le_bytes());
        }
        for v in c.lower().iter().chain(c.upper().iter()) {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b.extend_from_slice(&self.residual_norm.to_le_bytes());
        b.extend_from_slice(&(self.iterations as u64).to_le_bytes());
        for v in self.u.iter().chain(self.fields.f.iter()) {
            b.extend_from_slice(&v.to_le_bytes());
        }
        b
    }
}
