use crate::error::{GeoError, Result};
use crate::initial_data::InitialDataSet;
use crate::tensor::{ChartDomain, Point, SphericalMap};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DomainKind {
    /// Cartesian box, `u = 0` on all six faces.
    Box,
    /// Spherical shell `(r, theta, phi)` about `center` with `u = 0` on the
    /// outer sphere, a mirror condition at the excision radius, pole ghosts
    /// on a cell-centered theta axis and periodic phi.
    Ball { center: [f64; 3] },
}

/// Grid on which the Jang equation is discretized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JangDomain {
    pub chart: ChartDomain<3>,
    pub kind: DomainKind,
}

impl JangDomain {
    pub fn cartesian_box(lower: [f64; 3], upper: [f64; 3], nodes: [usize; 3]) -> Result<Self> {
        if nodes.iter().any(|n| *n < 5) {
            return Err(GeoError::ResolutionTooCoarse(format!("box nodes {nodes:?}, need at least 5 per axis")));
        }
        Ok(JangDomain { chart: ChartDomain::closed(lower, upper, nodes)?, kind: DomainKind::Box })
    }

    /// Coordinate ball of the given radius; theta nodes sit at
    /// `(j + 1/2) pi / n_theta` so no node lies on the axis.
    pub fn ball(center: [f64; 3], excision: f64, radius: f64, n_r: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if !(excision > 0.0 && excision < radius) {
            return Err(GeoError::InvalidChart(format!("excision radius {excision} must lie in (0, {radius})")));
        }
        if n_r < 5 || n_theta < 4 || n_phi < 4 || n_phi % 2 != 0 {
            return Err(GeoError::ResolutionTooCoarse(format!(
                "ball nodes ({n_r}, {n_theta}, {n_phi}); need n_r >= 5, n_theta >= 4 and even n_phi >= 4"
            )));
        }
        let ht = PI / n_theta as f64;
        let chart = ChartDomain::new(
            [excision, 0.5 * ht, 0.0],
            [radius, PI - 0.5 * ht, 2.0 * PI],
            [n_r, n_theta, n_phi],
            [false, false, true],
        )?;
        Ok(JangDomain { chart, kind: DomainKind::Ball { center } })
    }

    pub fn node_count(&self) -> usize {
        self.chart.node_count()
    }

    pub fn is_dirichlet(&self, idx: &[usize; 3]) -> bool {
        let n = self.chart.nodes();
        match self.kind {
            DomainKind::Box => (0..3).any(|a| idx[a] == 0 || idx[a] + 1 == n[a]),
            DomainKind::Ball { .. } => idx[0] + 1 == n[0],
        }
    }

    /// Node holding the value of `u` one step along `axis` in direction
    /// `dir`, following ghost maps. `None` past a Dirichlet face.
    pub fn neighbor(&self, idx: [usize; 3], axis: usize, dir: i32) -> Option<[usize; 3]> {
        let n = self.chart.nodes();
        let mut out = idx;
        let j = idx[axis] as i64 + dir as i64;
        if j >= 0 && (j as usize) < n[axis] {
            out[axis] = j as usize;
            return Some(out);
        }
        match (self.kind, axis) {
            (DomainKind::Box, _) => None,
            (DomainKind::Ball { .. }, 0) => {
                if j < 0 {
                    out[0] = 1;
                    Some(out)
                } else {
                    None
                }
            }
            (DomainKind::Ball { .. }, 1) => {
                out[2] = (idx[2] + n[2] / 2) % n[2];
                Some(out)
            }
            (DomainKind::Ball { .. }, _) => {
                out[2] = ((j + n[2] as i64) % n[2] as i64) as usize;
                Some(out)
            }
        }
    }

    fn step(&self, idx: [usize; 3], moves: &[(usize, i32)]) -> Option<usize> {
        let mut cur = idx;
        for &(a, d) in moves {
            cur = self.neighbor(cur, a, d)?;
        }
        Some(self.chart.linear_index(&cur))
    }

    /// Central stencils at a non-Dirichlet node: `first[a]` for `du/dx^a`
    /// and `second[a][b]` for `d^2u/dx^a dx^b`, as (node, weight) lists.
    pub fn central_stencils(&self, k: usize) -> Option<LocalStencil> {
        let idx = self.chart.multi_index(k);
        let h: [f64; 3] = std::array::from_fn(|a| self.chart.spacing(a));
        let mut first: [Vec<(usize, f64)>; 3] = Default::default();
        let mut second: [[Vec<(usize, f64)>; 3]; 3] = Default::default();
        for a in 0..3 {
            let up = self.step(idx, &[(a, 1)])?;
            let dn = self.step(idx, &[(a, -1)])?;
            first[a] = vec![(up, 0.5 / h[a]), (dn, -0.5 / h[a])];
            let w = 1.0 / (h[a] * h[a]);
            second[a][a] = vec![(up, w), (dn, w), (k, -2.0 * w)];
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let w = 0.25 / (h[a] * h[b]);
                let s = vec![
                    (self.step(idx, &[(a, 1), (b, 1)])?, w),
                    (self.step(idx, &[(a, -1), (b, -1)])?, w),
                    (self.step(idx, &[(a, 1), (b, -1)])?, -w),
                    (self.step(idx, &[(a, -1), (b, 1)])?, -w),
                ];
                second[a][b] = s.clone();
                second[b][a] = s;
            }
        }
        Some(LocalStencil { first, second })
    }

    /// Data in the coordinates of this grid.
    pub fn data(&self, ids: &InitialDataSet) -> InitialDataSet {
        match self.kind {
            DomainKind::Box => ids.clone(),
            DomainKind::Ball { center } => {
                ids.pullback(Arc::new(SphericalMap { center: Point::<3>::from(center) }), self.chart.clone())
            }
        }
    }

    /// Coordinate diameter used to scale tolerances.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Box => (0..3).map(|a| self.chart.width(a).powi(2)).sum::<f64>().sqrt(),
            DomainKind::Ball { .. } => 2.0 * self.chart.upper()[0],
        }
    }

    /// Linear index of the coarse node `idx` on a grid refined by `factor`
    /// (box: nodes `(n-1) factor + 1`; ball: r as the box, theta and phi
    /// multiplied by an odd factor).
    pub fn refined_index(&self, fine: &JangDomain, idx: &[usize; 3], factor: usize) -> usize {
        let f = match self.kind {
            DomainKind::Box => [idx[0] * factor, idx[1] * factor, idx[2] * factor],
            DomainKind::Ball { .. } => [idx[0] * factor, idx[1] * factor + (factor - 1) / 2, idx[2] * factor],
        };
        fine.chart.linear_index(&f)
    }
}

#[derive(Clone, Debug, Default)]
pub struct LocalStencil {
    pub first: [Vec<(usize, f64)>; 3],
    pub second: [[Vec<(usize, f64)>; 3]; 3],
}

impl LocalStencil {
    pub fn apply(list: &[(usize, f64)], u: &[f64]) -> f64 {
        list.iter().map(|(k, w)| w * u[*k]).sum()
    }
}
