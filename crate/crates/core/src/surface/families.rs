//! Closed-form embeddings with exact derivatives.

use super::{EmbeddingMap, Orientation, SurfaceEmbedding, Topology, Vec3};
use crate::error::{GeoError, Result};
use crate::tensor::{Analytic, ChartDomain, Jet, Point};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// (theta, phi) grid with closed theta axis `[0, pi]` and periodic phi.
pub fn sphere_domain(n_theta: usize, n_phi: usize) -> Result<ChartDomain<2>> {
    ChartDomain::new([0.0, 0.0], [PI, TAU], [n_theta, n_phi], [false, true])
}

pub fn torus_domain(n_v: usize, n_u: usize) -> Result<ChartDomain<2>> {
    ChartDomain::new([0.0, 0.0], [TAU, TAU], [n_v, n_u], [true, true])
}

/// Unit radial vector and its derivatives in (theta, phi).
fn unit_radial(t: f64, p: f64) -> (Vec3, [Vec3; 2], [[Vec3; 2]; 2]) {
    let (st, ct) = t.sin_cos();
    let (sp, cp) = p.sin_cos();
    let n = Vec3::new(st * cp, st * sp, ct);
    let nt = Vec3::new(ct * cp, ct * sp, -st);
    let np = Vec3::new(-st * sp, st * cp, 0.0);
    let ntp = Vec3::new(-ct * sp, ct * cp, 0.0);
    let npp = Vec3::new(-st * cp, -st * sp, 0.0);
    (n, [nt, np], [[-n, ntp], [ntp, npp]])
}

fn radial_hint(center: Vec3) -> super::OutwardHint {
    Arc::new(move |_p: &Point<2>, x: &Vec3| x - center)
}

/// Radial graph `center + rho(theta, phi) n(theta, phi)` with a scalar jet for rho.
fn radial_graph(domain: &ChartDomain<2>, center: Vec3, rho: impl Fn(f64, f64) -> Jet<2, f64> + Send + Sync + 'static) -> EmbeddingMap {
    Arc::new(Analytic::new(domain.clone(), move |x: &Point<2>| {
        let (n, dn, ddn) = unit_radial(x[0], x[1]);
        let r = rho(x[0], x[1]);
        let grad = [0, 1].map(|a| n * r.gradient[a] + dn[a] * r.value);
        let hess = [0, 1].map(|a| {
            [0, 1].map(|b| n * r.hessian[a][b] + dn[b] * r.gradient[a] + dn[a] * r.gradient[b] + ddn[a][b] * r.value)
        });
        Jet { value: center + n * r.value, gradient: grad, hessian: hess }
    }))
}

/// Coordinate sphere `|x - center| = r`.
pub fn coordinate_sphere(center: Vec3, r: f64, n_theta: usize, n_phi: usize) -> Result<SurfaceEmbedding> {
    if !(r > 0.0) {
        return Err(GeoError::InvalidData(format!("sphere radius {r} must be positive")));
    }
    let domain = sphere_domain(n_theta, n_phi)?;
    let map = radial_graph(&domain, center, move |_, _| Jet { value: r, gradient: [0.0; 2], hessian: [[0.0; 2]; 2] });
    Ok(SurfaceEmbedding {
        label: format!("coordinate_sphere(r={r})"),
        domain,
        topology: Topology::Sphere,
        map,
        orientation: Orientation::Inner,
        outward_hint: Some(radial_hint(center)),
    })
}

/// Spheroid `(a sin t cos p, a sin t sin p, c cos t)`.
pub fn spheroid(center: Vec3, a: f64, c: f64, n_theta: usize, n_phi: usize) -> Result<SurfaceEmbedding> {
    if !(a > 0.0 && c > 0.0) {
        return Err(GeoError::InvalidData("spheroid semi-axes must be positive".into()));
    }
    let domain = sphere_domain(n_theta, n_phi)?;
    let scale = Vec3::new(a, a, c);
    let map = Arc::new(Analytic::new(domain.clone(), move |x: &Point<2>| {
        let (n, dn, ddn) = unit_radial(x[0], x[1]);
        let s = |v: Vec3| v.component_mul(&scale);
        Jet { value: center + s(n), gradient: dn.map(s), hessian: ddn.map(|r| r.map(s)) }
    }));
    Ok(SurfaceEmbedding {
        label: format!("spheroid(a={a}, c={c})"),
        domain,
        topology: Topology::Sphere,
        map,
        orientation: Orientation::Inner,
        outward_hint: Some(radial_hint(center)),
    })
}

/// Torus of revolution about the z-axis, parameters (v, u) with v the
/// meridian angle: `((R + a cos v) cos u, (R + a cos v) sin u, a sin v)`.
pub fn torus(center: Vec3, big_r: f64, a: f64, n_v: usize, n_u: usize) -> Result<SurfaceEmbedding> {
    if !(a > 0.0 && big_r > a) {
        return Err(GeoError::InvalidData(format!("torus needs R > a > 0 (R={big_r}, a={a})")));
    }
    let domain = torus_domain(n_v, n_u)?;
    let map = Arc::new(Analytic::new(domain.clone(), move |x: &Point<2>| {
        let (sv, cv) = x[0].sin_cos();
        let (su, cu) = x[1].sin_cos();
        let rho = big_r + a * cv;
        let value = center + Vec3::new(rho * cu, rho * su, a * sv);
        let ev = Vec3::new(-a * sv * cu, -a * sv * su, a * cv);
        let eu = Vec3::new(-rho * su, rho * cu, 0.0);
        let evv = Vec3::new(-a * cv * cu, -a * cv * su, -a * sv);
        let evu = Vec3::new(a * sv * su, -a * sv * cu, 0.0);
        let euu = Vec3::new(-rho * cu, -rho * su, 0.0);
        Jet { value, gradient: [ev, eu], hessian: [[evv, evu], [evu, euu]] }
    }));
    let hint: super::OutwardHint = Arc::new(move |p: &Point<2>, x: &Vec3| {
        let core = center + Vec3::new(big_r * p[1].cos(), big_r * p[1].sin(), 0.0);
        x - core
    });
    Ok(SurfaceEmbedding {
        label: format!("torus(R={big_r}, a={a})"),
        domain,
        topology: Topology::Torus,
        map,
        orientation: Orientation::Inner,
        outward_hint: Some(hint),
    })
}

/// Real spherical-harmonic perturbation term `amplitude * P_l^|m|(cos t) * trig(m p)`
/// with `cos` for `m >= 0` and `sin` for `m < 0` (unnormalized).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicTerm {
    pub l: u32,
    pub m: i32,
    pub amplitude: f64,
}

fn legendre(l: u32) -> Vec<f64> {
    let mut p0 = vec![1.0];
    if l == 0 {
        return p0;
    }
    let mut p1 = vec![0.0, 1.0];
    for n in 1..l as usize {
        let mut next = vec![0.0; n + 2];
        for (i, c) in p1.iter().enumerate() {
            next[i + 1] += (2 * n + 1) as f64 * c;
        }
        for (i, c) in p0.iter().enumerate() {
            next[i] -= n as f64 * c;
        }
        for c in next.iter_mut() {
            *c /= (n + 1) as f64;
        }
        p0 = p1;
        p1 = next;
    }
    p1
}

fn derive(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// `S(t) = sin^m t * Q(cos t)` with `Q = d^m P_l`, and its first two derivatives.
fn theta_part(l: u32, m: u32, t: f64) -> [f64; 3] {
    let mut q = legendre(l);
    for _ in 0..m {
        q = derive(&q);
    }
    let q1 = derive(&q);
    let q2 = derive(&q1);
    let (s, c) = t.sin_cos();
    let (qv, qd, qdd) = (horner(&q, c), horner(&q1, c), horner(&q2, c));
    let mf = m as f64;
    let sp = |k: i32| if k <= 0 { 1.0 } else { s.powi(k) };
    let mi = m as i32;
    let v = sp(mi) * qv;
    let mut d1 = -sp(mi + 1) * qd;
    if m >= 1 {
        d1 += mf * sp(mi - 1) * c * qv;
    }
    let mut d2 = -mf * sp(mi) * qv - (2.0 * mf + 1.0) * sp(mi) * c * qd + sp(mi + 2) * qdd;
    if m >= 2 {
        d2 += mf * (mf - 1.0) * sp(mi - 2) * c * c * qv;
    }
    [v, d1, d2]
}

/// Star-shaped surface `r0 (1 + sum of harmonic terms)` about `center`.
pub fn graph_over_sphere(center: Vec3, r0: f64, terms: &[HarmonicTerm], n_theta: usize, n_phi: usize) -> Result<SurfaceEmbedding> {
    if !(r0 > 0.0) {
        return Err(GeoError::InvalidData("base radius must be positive".into()));
    }
    for t in terms {
        if t.m.unsigned_abs() > t.l {
            return Err(GeoError::InvalidData(format!("harmonic term |m| = {} exceeds l = {}", t.m.abs(), t.l)));
        }
    }
    let domain = sphere_domain(n_theta, n_phi)?;
    let terms = terms.to_vec();
    let eval = move |t: f64, p: f64| {
        let mut j = Jet { value: r0, gradient: [0.0; 2], hessian: [[0.0; 2]; 2] };
        for term in &terms {
            let m = term.m.unsigned_abs();
            let [s, s1, s2] = theta_part(term.l, m, t);
            let mf = m as f64;
            let (f, f1, f2) = if term.m >= 0 {
                ((mf * p).cos(), -mf * (mf * p).sin(), -mf * mf * (mf * p).cos())
            } else {
                ((mf * p).sin(), mf * (mf * p).cos(), -mf * mf * (mf * p).sin())
            };
            let k = r0 * term.amplitude;
            j.value += k * s * f;
            j.gradient[0] += k * s1 * f;
            j.gradient[1] += k * s * f1;
            j.hessian[0][0] += k * s2 * f;
            j.hessian[0][1] += k * s1 * f1;
            j.hessian[1][1] += k * s * f2;
        }
        j.hessian[1][0] = j.hessian[0][1];
        j
    };
    // reject perturbations that make the radius non-positive
    for k in 0..domain.node_count() {
        let x = domain.point(k);
        if eval(x[0], x[1]).value <= 0.0 {
            return Err(GeoError::InvalidData("perturbed radius is not positive".into()));
        }
    }
    let map = radial_graph(&domain, center, eval);
    Ok(SurfaceEmbedding {
        label: format!("graph_over_sphere(r0={r0})"),
        domain,
        topology: Topology::Sphere,
        map,
        orientation: Orientation::Inner,
        outward_hint: Some(radial_hint(center)),
    })
}
