use super::grid::{JangDomain, LocalStencil};
use super::linear::Csr;
use crate::error::{GeoError, Result};
use crate::initial_data::InitialDataSet;
use crate::tensor::{christoffel_from_jet, Christoffel, Mat, Point};
use nalgebra::Vector3;
use rayon::prelude::*;

/// Metric, inverse, Christoffel symbols and `K` sampled at every node.
pub struct NodeData {
    pub g: Mat<3>,
    pub ginv: Mat<3>,
    pub gamma: Christoffel<3>,
    pub k: Mat<3>,
}

/// The discretized Jang operator on a grid, with `K` scaled by the
/// continuation parameter.
pub struct JangProblem {
    pub domain: JangDomain,
    pub nodes: Vec<NodeData>,
    stencils: Vec<Option<LocalStencil>>,
}

/// Jang equation quantities at one node.
pub struct Local {
    pub residual: f64,
    pub du: Vector3<f64>,
    /// `dR/d(du_m)`
    pub d_first: Vector3<f64>,
    /// `dR/d(d^2u_ab)`
    pub d_second: Mat<3>,
}

/// Jang operator at a node given first and second coordinate derivatives.
pub fn jang_local(n: &NodeData, du: &Vector3<f64>, ddu: &Mat<3>, s: f64) -> Local {
    let mut hs = *ddu;
    for m in 0..3 {
        hs -= n.gamma[m] * du[m];
    }
    let uu = n.ginv * du;
    let q = 1.0 + du.dot(&uu);
    let sq = q.sqrt();
    let a = n.ginv - uu * uu.transpose() / q;
    let k = n.k * s;
    let b = hs / sq - k;
    let residual = a.component_mul(&b).sum();
    let t = a.component_mul(&hs).sum();
    let buu = b * uu;
    let uu_b_uu = uu.dot(&buu);
    let gbuu = n.ginv * buu;
    let d_first = Vector3::from_fn(|m, _| {
        -2.0 / q * gbuu[m] + 2.0 * uu[m] / (q * q) * uu_b_uu - a.component_mul(&n.gamma[m]).sum() / sq
            - t * uu[m] / (q * sq)
    });
    Local { residual, du: *du, d_first, d_second: a / sq }
}

impl JangProblem {
    pub fn new(domain: JangDomain, ids: &InitialDataSet) -> Result<Self> {
        let data = domain.data(ids);
        let nodes = (0..domain.node_count())
            .into_par_iter()
            .map(|k| {
                let x = domain.chart.point(k);
                let jet = data.metric.jet1(&x)?;
                let kk = data.extrinsic.value(&x)?;
                if !kk.iter().all(|v| v.is_finite()) {
                    return Err(GeoError::InvalidData(format!("non-finite K at {:?}", x.as_slice())));
                }
                Ok(NodeData { g: jet.g, ginv: jet.ginv, gamma: christoffel_from_jet(&jet), k: (kk + kk.transpose()) * 0.5 })
            })
            .collect::<Result<Vec<_>>>()?;
        let stencils = (0..domain.node_count())
            .map(|k| {
                if domain.is_dirichlet(&domain.chart.multi_index(k)) {
                    None
                } else {
                    domain.central_stencils(k)
                }
            })
            .collect();
        Ok(JangProblem { domain, nodes, stencils })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.stencils[k].is_some()
    }

    pub fn point(&self, k: usize) -> Point<3> {
        self.domain.chart.point(k)
    }

    fn derivatives(st: &LocalStencil, u: &[f64]) -> (Vector3<f64>, Mat<3>) {
        let du = Vector3::from_fn(|a, _| LocalStencil::apply(&st.first[a], u));
        let ddu = Mat::<3>::from_fn(|a, b| LocalStencil::apply(&st.second[a][b], u));
        (du, ddu)
    }

    pub fn local(&self, u: &[f64], k: usize, s: f64) -> Option<Local> {
        let st = self.stencils[k].as_ref()?;
        let (du, ddu) = Self::derivatives(st, u);
        Some(jang_local(&self.nodes[k], &du, &ddu, s))
    }

    /// Residual vector: the Jang operator at interior nodes, `u` itself on Dirichlet
    /// nodes.
    pub fn residual(&self, u: &[f64], s: f64) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|k| self.local(u, k, s).map_or(u[k], |l| l.residual))
            .collect()
    }

    /// Sup norm of the residual over interior nodes.
    pub fn interior_norm(&self, r: &[f64]) -> f64 {
        (0..self.len()).filter(|k| self.is_interior(*k)).map(|k| r[k].abs()).fold(0.0, f64::max)
    }

    /// Largest `|du|_g` with its node.
    pub fn max_gradient(&self, u: &[f64]) -> (usize, f64) {
        (0..self.len())
            .filter_map(|k| {
                let st = self.stencils[k].as_ref()?;
                let du = Vector3::from_fn(|a, _| LocalStencil::apply(&st.first[a], u));
                Some((k, du.dot(&(self.nodes[k].ginv * du)).sqrt()))
            })
            .fold((0, 0.0), |acc, e| if e.1 > acc.1 || !e.1.is_finite() { e } else { acc })
    }

    pub fn jacobian(&self, u: &[f64], s: f64) -> Csr {
        let rows = (0..self.len())
            .into_par_iter()
            .map(|k| {
                let Some(st) = self.stencils[k].as_ref() else {
                    return vec![(k, 1.0)];
                };
                let (du, ddu) = Self::derivatives(st, u);
                let l = jang_local(&self.nodes[k], &du, &ddu, s);
                let mut row = Vec::with_capacity(40);
                for a in 0..3 {
                    row.extend(st.first[a].iter().map(|(c, w)| (*c, w * l.d_first[a])));
                    for b in 0..3 {
                        row.extend(st.second[a][b].iter().map(|(c, w)| (*c, w * l.d_second[(a, b)])));
                    }
                }
                row
            })
            .collect();
        Csr::from_rows(rows)
    }
}
