use super::{Orientation, SurfaceEmbedding, Topology, Vec3};
use crate::error::{GeoError, Result};
use crate::tensor::linalg::pairwise_sum;
use crate::tensor::{christoffel_from_jet, inverse, quadrature_weights, Mat, MetricField, TensorField};
use rayon::prelude::*;

type Mat2 = Mat<2>;

/// Per-node extrinsic geometry of an embedded surface.
#[derive(Clone, Debug)]
pub struct SurfaceGeometry {
    pub positions: Vec<Vec3>,
    pub tangents: Vec<[Vec3; 2]>,
    /// Induced metric `gamma_ab`.
    pub induced: Vec<Mat2>,
    pub area_density: Vec<f64>,
    /// Unit normal (contravariant components) with the declared orientation.
    pub normal: Vec<Vec3>,
    /// `h_ab = g(N, nabla_a e_b)`, so that `nabla_X N = -A X`.
    pub second_form: Vec<Mat2>,
    /// Shape operator `A^a_b`.
    pub shape: Vec<Mat2>,
    pub mean_curvature: Vec<f64>,
    /// Quadrature weight times area density; zero at coordinate poles.
    pub weights: Vec<f64>,
    /// Nodes included in sup/inf scans.
    pub scan_mask: Vec<bool>,
    pub pole: Vec<bool>,
    pub ambient: Vec<Mat<3>>,
    pub topology: Topology,
    pub nodes: [usize; 2],
}

struct Raw {
    x: Vec3,
    e: [Vec3; 2],
    gamma: Mat2,
    n_raw: Vec3,
    flux: f64,
    flux_scale: f64,
    dde: [[Vec3; 2]; 2],
    g: Mat<3>,
}

/// Induced metric `g(d_a iota, d_b iota)` at every node. Pole nodes of
/// spherical parametrizations are coordinate-degenerate and included as is.
pub fn induced_metric(s: &SurfaceEmbedding, g: &MetricField<3>) -> Result<Vec<Mat2>> {
    (0..s.domain.node_count())
        .map(|k| {
            let p = s.domain.point(k);
            let x = s.map.value(&p)?;
            let e = s.map.gradient(&p)?;
            let gm = g.value(&x)?;
            let gamma = Mat2::from_fn(|a, b| e[a].dot(&(gm * e[b])));
            if !s.is_pole(k) && gamma.determinant() <= 0.0 {
                return Err(GeoError::DegenerateImmersion { param: p.iter().copied().collect() });
            }
            Ok(gamma)
        })
        .collect()
}

impl SurfaceGeometry {
    pub fn compute(s: &SurfaceEmbedding, g: &MetricField<3>) -> Result<Self> {
        let dom = &s.domain;
        let n = dom.node_count();
        let raw: Vec<Option<Raw>> = (0..n)
            .into_par_iter()
            .map(|k| {
                if s.is_pole(k) {
                    return Ok(None);
                }
                let p = dom.point(k);
                let x = s.map.value(&p)?;
                let e = s.map.gradient(&p)?;
                let dde = s.map.hessian(&p)?;
                let jet = g.jet1(&x)?;
                let gamma = Mat2::from_fn(|a, b| e[a].dot(&(jet.g * e[b])));
                let degenerate = || GeoError::DegenerateImmersion { param: p.iter().copied().collect() };
                if !(gamma.determinant() > 0.0) {
                    return Err(degenerate());
                }
                let ncov = e[0].cross(&e[1]);
                let nn = ncov.dot(&(jet.ginv * ncov));
                if !(nn > 0.0) {
                    return Err(degenerate());
                }
                let n_raw = jet.ginv * ncov / nn.sqrt();
                let hint = match &s.outward_hint {
                    Some(h) => h(&p, &x),
                    None => x,
                };
                let gam = christoffel_from_jet(&jet);
                let cov = |a: usize, b: usize| {
                    let mut v = dde[a][b];
                    for (kk, gk) in gam.iter().enumerate() {
                        v[kk] += e[a].dot(&(gk * e[b]));
                    }
                    v
                };
                Ok(Some(Raw {
                    x,
                    e,
                    gamma,
                    n_raw,
                    flux: ncov.dot(&hint),
                    flux_scale: ncov.norm() * hint.norm(),
                    dde: [[cov(0, 0), cov(0, 1)], [cov(1, 0), cov(1, 1)]],
                    g: jet.g,
                }))
            })
            .collect::<Result<_>>()?;

        // Orientation: every node with a non-negligible flux must agree.
        let (mut pos, mut neg) = (0usize, 0usize);
        for r in raw.iter().flatten() {
            if r.flux > 1e-8 * r.flux_scale {
                pos += 1;
            } else if r.flux < -1e-8 * r.flux_scale {
                neg += 1;
            }
        }
        if (pos > 0) == (neg > 0) {
            return Err(GeoError::OrientationUnresolved(format!(
                "{pos} nodes with outward flux, {neg} with inward flux"
            )));
        }
        let outward = if pos > 0 { 1.0 } else { -1.0 };
        let sign = match s.orientation {
            Orientation::Outer => outward,
            Orientation::Inner => -outward,
        };

        let qw = quadrature_weights(dom);
        let nodes = dom.nodes();
        let mut geo = SurfaceGeometry {
            positions: Vec::with_capacity(n),
            tangents: Vec::with_capacity(n),
            induced: Vec::with_capacity(n),
            area_density: Vec::with_capacity(n),
            normal: Vec::with_capacity(n),
            second_form: Vec::with_capacity(n),
            shape: Vec::with_capacity(n),
            mean_curvature: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            scan_mask: Vec::with_capacity(n),
            pole: Vec::with_capacity(n),
            ambient: Vec::with_capacity(n),
            topology: s.topology,
            nodes,
        };
        for (k, r) in raw.iter().enumerate() {
            let j = dom.multi_index(k)[0];
            let in_scan = s.topology != Topology::Sphere || (j >= 2 && j + 2 < nodes[0]);
            geo.scan_mask.push(in_scan);
            match r {
                Some(r) => {
                    let nvec = r.n_raw * sign;
                    let h = Mat2::from_fn(|a, b| nvec.dot(&(r.g * r.dde[a][b])));
                    let h = (h + h.transpose()) * 0.5;
                    let ginv2 = inverse(&r.gamma).ok_or_else(|| GeoError::DegenerateImmersion {
                        param: dom.point(k).iter().copied().collect(),
                    })?;
                    let a = ginv2 * h;
                    let dens = r.gamma.determinant().sqrt();
                    geo.positions.push(r.x);
                    geo.tangents.push(r.e);
                    geo.induced.push(r.gamma);
                    geo.area_density.push(dens);
                    geo.normal.push(nvec);
                    geo.second_form.push(h);
                    geo.shape.push(a);
                    geo.mean_curvature.push(a.trace());
                    geo.weights.push(qw[k] * dens);
                    geo.pole.push(false);
                    geo.ambient.push(r.g);
                }
                None => {
                    let p = dom.point(k);
                    let x = s.map.value(&p)?;
                    geo.positions.push(x);
                    geo.tangents.push([Vec3::zeros(); 2]);
                    geo.induced.push(Mat2::zeros());
                    geo.area_density.push(0.0);
                    geo.normal.push(Vec3::zeros());
                    geo.second_form.push(Mat2::zeros());
                    geo.shape.push(Mat2::zeros());
                    geo.mean_curvature.push(0.0);
                    geo.weights.push(0.0);
                    geo.pole.push(true);
                    geo.ambient.push(g.value(&x)?);
                }
            }
        }
        geo.mean_curvature = geo.fill_poles(&geo.mean_curvature);
        // pole normals: average of the adjacent ring, renormalized
        if s.topology == Topology::Sphere {
            for (row, next) in [(0, 1), (nodes[0] - 1, nodes[0] - 2)] {
                let mut avg = Vec3::zeros();
                for c in 0..nodes[1] {
                    avg += geo.normal[next * nodes[1] + c];
                }
                let gm = geo.ambient[row * nodes[1]];
                let nrm = avg.dot(&(gm * avg)).sqrt();
                for c in 0..nodes[1] {
                    geo.normal[row * nodes[1] + c] = avg / nrm;
                }
            }
        }
        Ok(geo)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Replace values at pole nodes by the mean over the adjacent ring.
    pub fn fill_poles(&self, values: &[f64]) -> Vec<f64> {
        let mut out = values.to_vec();
        if self.topology == Topology::Sphere {
            let [nt, np] = self.nodes;
            for (row, next) in [(0, 1), (nt - 1, nt - 2)] {
                let mean = pairwise_sum(&values[next * np..(next + 1) * np]) / np as f64;
                out[row * np..(row + 1) * np].fill(mean);
            }
        }
        out
    }

    /// Surface integral of node samples; pole nodes carry zero weight.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| if *w == 0.0 { 0.0 } else { w * v })
            .collect();
        pairwise_sum(&terms)
    }

    pub fn area(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// Min and max over the scan mask.
    pub fn scan_range(&self, values: &[f64]) -> (f64, f64) {
        values
            .iter()
            .zip(&self.scan_mask)
            .filter(|(_, m)| **m)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v)))
    }

    /// Largest norm of the trace-free part of the shape operator over the scan mask.
    pub fn umbilicity_defect(&self) -> f64 {
        self.shape
            .iter()
            .zip(&self.scan_mask)
            .filter(|(_, m)| **m)
            .map(|(a, _)| {
                let tf = a - Mat2::identity() * (0.5 * a.trace());
                (tf * tf).trace().abs().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// `tr_Sigma K = gamma^{ab} K(e_a, e_b)`; pole values are ring means.
pub fn trace_sigma_k(geo: &SurfaceGeometry, k: &TensorField<3>) -> Result<Vec<f64>> {
    let vals = (0..geo.len())
        .map(|i| {
            if geo.pole[i] {
                return Ok(0.0);
            }
            let kk = k.value(&geo.positions[i])?;
            let gamma_inv = inverse(&geo.induced[i]).ok_or(GeoError::DegenerateImmersion { param: vec![] })?;
            let e = geo.tangents[i];
            let kab = Mat2::from_fn(|a, b| e[a].dot(&(kk * e[b])));
            Ok(gamma_inv.component_mul(&kab).sum())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(geo.fill_poles(&vals))
}

/// `Tr_M K - K(N, N)`, the same trace computed through the normal.
pub fn trace_sigma_k_via_normal(geo: &SurfaceGeometry, k: &TensorField<3>) -> Result<Vec<f64>> {
    let vals = (0..geo.len())
        .map(|i| {
            if geo.pole[i] {
                return Ok(0.0);
            }
            let kk = k.value(&geo.positions[i])?;
            let ginv = inverse(&geo.ambient[i]).ok_or(GeoError::SingularMetric { point: vec![] })?;
            let nv = geo.normal[i];
            Ok(ginv.component_mul(&kk).sum() - nv.dot(&(kk * nv)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(geo.fill_poles(&vals))
}

