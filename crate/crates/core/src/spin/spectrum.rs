//! Dirac spectra on surfaces of revolution.
//!
//! For a metric `A(t)^2 dt^2 + rho(t)^2 dphi^2` the operator splits into
//! Fourier modes `e^{i m phi}`. In each mode the squared operator reduces to
//! the Sturm-Liouville problem `-(E^2 y'/A)' = lambda^2 A E^2 y` with
//! `E = exp(m int A/rho)`, which is discretized by a staggered finite-volume
//! scheme. Sphere-type profiles close off at both ends; tori are periodic.

use crate::error::{GeoError, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProfileKind {
    /// `rho` vanishes at both ends with `rho'/A -> +1, -1`.
    Sphere,
    /// Periodic in `t`, `rho > 0` throughout.
    Torus,
}

/// Meridian data of a rotationally symmetric metric `A^2 dt^2 + rho^2 dphi^2`
/// on `t in [0, length]`.
pub trait MeridianProfile: Send + Sync {
    fn kind(&self) -> ProfileKind;
    fn length(&self) -> f64;
    fn a(&self, t: f64) -> f64;
    fn rho(&self, t: f64) -> f64;
}

pub type Profile = Arc<dyn MeridianProfile>;

#[derive(Clone, Copy, Debug)]
pub struct RoundSphere {
    pub radius: f64,
}

impl MeridianProfile for RoundSphere {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Sphere
    }
    fn length(&self) -> f64 {
        PI
    }
    fn a(&self, _t: f64) -> f64 {
        self.radius
    }
    fn rho(&self, t: f64) -> f64 {
        self.radius * t.sin()
    }
}

/// `(a sin t, c cos t)` with equatorial radius `a` and polar half-axis `c`.
#[derive(Clone, Copy, Debug)]
pub struct Spheroid {
    pub a: f64,
    pub c: f64,
}

impl MeridianProfile for Spheroid {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Sphere
    }
    fn length(&self) -> f64 {
        PI
    }
    fn a(&self, t: f64) -> f64 {
        (self.a * t.cos()).hypot(self.c * t.sin())
    }
    fn rho(&self, t: f64) -> f64 {
        self.a * t.sin()
    }
}

/// Torus with core radius `major` and tube radius `minor`; `t` is the angle
/// around the tube.
#[derive(Clone, Copy, Debug)]
pub struct TorusProfile {
    pub major: f64,
    pub minor: f64,
}

impl MeridianProfile for TorusProfile {
    fn kind(&self) -> ProfileKind {
        ProfileKind::Torus
    }
    fn length(&self) -> f64 {
        2.0 * PI
    }
    fn a(&self, _t: f64) -> f64 {
        self.minor
    }
    fn rho(&self, t: f64) -> f64 {
        self.major + self.minor * t.cos()
    }
}

/// Profile given by closures, e.g. an arc-length parametrized curve with
/// `A = 1`.
pub struct CurveProfile {
    pub kind: ProfileKind,
    pub length: f64,
    pub a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub rho: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MeridianProfile for CurveProfile {
    fn kind(&self) -> ProfileKind {
        self.kind
    }
    fn length(&self) -> f64 {
        self.length
    }
    fn a(&self, t: f64) -> f64 {
        (self.a)(t)
    }
    fn rho(&self, t: f64) -> f64 {
        (self.rho)(t)
    }
}

/// The conformal metric `F^2 g` of a base profile.
pub struct Conformal {
    pub base: Profile,
    pub factor: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl MeridianProfile for Conformal {
    fn kind(&self) -> ProfileKind {
        self.base.kind()
    }
    fn length(&self) -> f64 {
        self.base.length()
    }
    fn a(&self, t: f64) -> f64 {
        (self.factor)(t) * self.base.a(t)
    }
    fn rho(&self, t: f64) -> f64 {
        (self.factor)(t) * self.base.rho(t)
    }
}

struct Reversed(Profile);

impl MeridianProfile for Reversed {
    fn kind(&self) -> ProfileKind {
        self.0.kind()
    }
    fn length(&self) -> f64 {
        self.0.length()
    }
    fn a(&self, t: f64) -> f64 {
        self.0.a(self.0.length() - t)
    }
    fn rho(&self, t: f64) -> f64 {
        self.0.rho(self.0.length() - t)
    }
}

/// Spin structure on a torus of revolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TorusSpin {
    pub meridian_antiperiodic: bool,
    pub longitude_antiperiodic: bool,
}

impl Default for TorusSpin {
    fn default() -> Self {
        TorusSpin { meridian_antiperiodic: true, longitude_antiperiodic: true }
    }
}

#[derive(Clone)]
pub struct RevolutionDiracProblem {
    pub profile: Profile,
    /// Largest `|m|` included; modes run over half-integers (or integers for
    /// a longitude-periodic torus) up to this bound.
    pub max_mode: f64,
    pub resolution: usize,
    pub torus_spin: TorusSpin,
}

impl RevolutionDiracProblem {
    pub fn new(profile: Profile, max_mode: f64, resolution: usize) -> Self {
        RevolutionDiracProblem { profile, max_mode, resolution, torus_spin: TorusSpin::default() }
    }

    pub fn with_torus_spin(mut self, spin: TorusSpin) -> Self {
        self.torus_spin = spin;
        self
    }

    pub fn modes(&self) -> Vec<f64> {
        let half = self.profile.kind() == ProfileKind::Sphere || self.torus_spin.longitude_antiperiodic;
        let offset = if half { 0.5 } else { 0.0 };
        let mut out = Vec::new();
        let mut m = offset;
        while m <= self.max_mode + 1e-12 {
            if m == 0.0 {
                out.push(0.0);
            } else {
                out.push(-m);
                out.push(m);
            }
            m += 1.0;
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub mode: f64,
    pub index: usize,
    pub lambda: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiracSpectrum {
    /// Sorted by `|lambda|`, ties keep mode order.
    pub entries: Vec<SpectrumEntry>,
}

impl DiracSpectrum {
    pub fn lambda1(&self) -> f64 {
        self.entries.first().map_or(f64::NAN, |e| e.lambda.abs())
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Largest distance from `-lambda` to the nearest computed eigenvalue.
    pub fn symmetry_defect(&self) -> f64 {
        let vals = self.values();
        vals.iter()
            .map(|l| vals.iter().map(|k| (k + l).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("mode,eigenvalue_index,lambda\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{:.15e}\n", e.mode, e.index, e.lambda));
        }
        s
    }
}

/// `±(k+1)/r` with multiplicity `2(k+1)` each, sorted by modulus.
pub fn sphere_dirac_spectrum(r: f64, count: usize) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return Err(GeoError::NonPositive { what: format!("sphere radius {r}") });
    }
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let l = (k + 1) as f64 / r;
        for _ in 0..2 * (k + 1) {
            out.push(l);
            out.push(-l);
        }
        k += 1;
    }
    out.truncate(count);
    Ok(out)
}

const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gauss(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_NODES.iter().zip(GL_WEIGHTS).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Gauss points on the half cells `[k h/2, (k+1) h/2]` of a sphere-type
/// profile with `log A + ln w` and the regularized `I(t) = int A/rho`.
struct HalfCellTable {
    log_aw: Vec<[f64; 8]>,
    integral: Vec<[f64; 8]>,
}

fn half_cell_table(p: &dyn MeridianProfile, n: usize) -> Result<HalfCellTable> {
    let t_len = p.length();
    let h = t_len / (n as f64 + 0.5);
    let cells = 2 * n + 1;
    let edge = |k: usize| if k == cells { t_len } else { 0.5 * h * k as f64 };
    let smooth = |t: f64| p.a(t) / p.rho(t) - 1.0 / t - 1.0 / (t_len - t);
    let mut cum = vec![0.0; cells + 1];
    for k in 0..cells {
        cum[k + 1] = cum[k] + gauss(edge(k), edge(k + 1), smooth);
    }
    let mid = 0.5 * t_len;
    let kmid = ((mid / (0.5 * h)) as usize).min(cells - 1);
    let r_mid = cum[kmid] + gauss(edge(kmid), mid, smooth);
    let mut log_aw = Vec::with_capacity(cells);
    let mut integral = Vec::with_capacity(cells);
    for k in 0..cells {
        let (a, b) = (edge(k), edge(k + 1));
        let (c, hw) = (0.5 * (a + b), 0.5 * (b - a));
        let mut lw = [0.0; 8];
        let mut ii = [0.0; 8];
        for q in 0..8 {
            let t = c + hw * GL_NODES[q];
            let av = p.a(t);
            let rv = p.rho(t);
            if !(av > 0.0 && rv > 0.0 && av.is_finite() && rv.is_finite()) {
                return Err(GeoError::ProfileDegenerate(format!("A = {av}, rho = {rv} at t = {t}")));
            }
            lw[q] = (av * GL_WEIGHTS[q] * hw).ln();
            ii[q] = (t / mid).ln() - ((t_len - t) / mid).ln() + cum[k] + gauss(a, t, smooth) - r_mid;
        }
        log_aw.push(lw);
        integral.push(ii);
    }
    Ok(HalfCellTable { log_aw, integral })
}

fn log_sum_exp(it: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = it.collect();
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
}

/// Symmetric tridiagonal matrix `W^{-1/2} K W^{-1/2}` of mode `m >= 0`.
fn sphere_mode_matrix(tab: &HalfCellTable, n: usize, m: f64) -> (Vec<f64>, Vec<f64>) {
    let cell = |k: usize, sign: f64| {
        log_sum_exp((0..8).map(|q| tab.log_aw[k][q] + sign * 2.0 * m * tab.integral[k][q]))
    };
    let log_w: Vec<f64> = (0..n).map(|i| log_sum_exp([cell(2 * i, 1.0), cell(2 * i + 1, 1.0)].into_iter())).collect();
    // Flux between node i and i+1 (node n is the Dirichlet point).
    let log_p: Vec<f64> = (0..n).map(|i| -log_sum_exp([cell(2 * i + 1, -1.0), cell(2 * i + 2, -1.0)].into_iter())).collect();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        diag[i] += (log_p[i] - log_w[i]).exp();
        if i + 1 < n {
            diag[i + 1] += (log_p[i] - log_w[i + 1]).exp();
            off[i] = -(log_p[i] - 0.5 * (log_w[i] + log_w[i + 1])).exp();
        }
    }
    (diag, off)
}

fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest `k` eigenvalues of a symmetric tridiagonal matrix by bisection.
fn tridiagonal_smallest(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (0..k.min(n))
        .map(|j| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if c <= a || c >= b || b - a <= 4.0 * f64::EPSILON * b.abs().max(a.abs()) {
                    break;
                }
                if sturm_count(diag, off, c) > j {
                    b = c;
                } else {
                    a = c;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

fn check_sphere_ends(p: &dyn MeridianProfile) -> Result<()> {
    let t_len = p.length();
    if !(t_len > 0.0 && t_len.is_finite()) {
        return Err(GeoError::ProfileDegenerate(format!("meridian length {t_len}")));
    }
    for (t, sign) in [(0.0, 1.0), (t_len, -1.0)] {
        let rv = p.rho(t);
        let h = 1e-6 * t_len;
        let tt = if sign > 0.0 { t + h } else { t - h };
        let slope = (p.rho(tt) - rv) / h / p.a(tt);
        if rv.abs() > 1e-8 * t_len || (slope - 1.0).abs() > 1e-3 {
            return Err(GeoError::ProfileDegenerate(format!("end t = {t} is not a smooth cap (rho = {rv}, rho'/A = {slope})")));
        }
    }
    Ok(())
}

/// Squared eigenvalues `lambda^2` of mode `m` on a sphere-type profile.
fn sphere_mode(forward: &HalfCellTable, reversed: &HalfCellTable, n: usize, m: f64, k: usize) -> Vec<f64> {
    let tab = if m >= 0.0 { forward } else { reversed };
    let (d, o) = sphere_mode_matrix(tab, n, m.abs());
    tridiagonal_smallest(&d, &o, k)
}

/// Squared eigenvalues of mode `m` on a torus profile from the staggered
/// first-order operator `B = (1/A) d/dt - m/rho`.
fn torus_mode(p: &dyn MeridianProfile, n: usize, m: f64, anti: bool, k: usize) -> Result<Vec<f64>> {
    let h = p.length() / n as f64;
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let t = i as f64 * h;
        let mid = t + 0.5 * h;
        let (am, rm) = (p.a(mid), p.rho(mid));
        if !(am > 0.0 && rm > 0.0) {
            return Err(GeoError::ProfileDegenerate(format!("A = {am}, rho = {rm} at t = {mid}")));
        }
        let j = (i + 1) % n;
        let sgn = if anti && j == 0 { -1.0 } else { 1.0 };
        let wa = (am * h).sqrt();
        let wi = (p.a(t) * h).sqrt();
        let wj = (p.a(j as f64 * h) * h).sqrt();
        c[(i, i)] += wa * (-1.0 / (am * h) - 0.5 * m / rm) / wi;
        c[(i, j)] += wa * sgn * (1.0 / (am * h) - 0.5 * m / rm) / wj;
    }
    let ctc = c.transpose() * &c;
    let mut ev: Vec<f64> = SymmetricEigen::new(ctc).eigenvalues.iter().map(|v| v.max(0.0)).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev.truncate(k);
    Ok(ev)
}

/// Union over Fourier modes of the `count` smallest `|lambda|` per mode,
/// each contributing `±lambda`.
pub fn revolution_dirac_spectrum(p: &RevolutionDiracProblem, count: usize) -> Result<DiracSpectrum> {
    let n = p.resolution;
    if n < 4 {
        return Err(GeoError::ResolutionTooCoarse(format!("{n} meridian cells")));
    }
    let modes = p.modes();
    if modes.is_empty() {
        return Err(GeoError::InvalidData("empty mode range".into()));
    }
    let per_mode: Vec<(f64, Vec<f64>)> = match p.profile.kind() {
        ProfileKind::Sphere => {
            check_sphere_ends(p.profile.as_ref())?;
            let forward = half_cell_table(p.profile.as_ref(), n)?;
            let reversed = half_cell_table(&Reversed(p.profile.clone()), n)?;
            modes.par_iter().map(|&m| (m, sphere_mode(&forward, &reversed, n, m, count))).collect()
        }
        ProfileKind::Torus => modes
            .par_iter()
            .map(|&m| torus_mode(p.profile.as_ref(), n, m, p.torus_spin.meridian_antiperiodic, count).map(|v| (m, v)))
            .collect::<Result<_>>()?,
    };
    let mut entries = Vec::new();
    for (m, mus) in &per_mode {
        for (j, mu) in mus.iter().enumerate() {
            let l = mu.max(0.0).sqrt();
            entries.push(SpectrumEntry { mode: *m, index: 2 * j, lambda: l });
            entries.push(SpectrumEntry { mode: *m, index: 2 * j + 1, lambda: -l });
        }
    }
    entries.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()));
    if let Some(first) = entries.first() {
        let edge = first.mode.abs() >= p.max_mode - 1e-12;
        let interior_min = entries
            .iter()
            .filter(|e| e.mode.abs() < p.max_mode - 1e-12)
            .map(|e| e.lambda.abs())
            .fold(f64::INFINITY, f64::min);
        if edge && first.lambda.abs() < interior_min * (1.0 - 1e-9) {
            return Err(GeoError::ModeRangeInsufficient { mode: first.mode });
        }
    }
    entries.truncate(count);
    Ok(DiracSpectrum { entries })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConformalBound {
    pub lambda1: f64,
    pub margin: f64,
}

/// `lambda_1` of the Dirac operator of `F^2 g` minus one half.
pub fn conformal_bound_check(
    base: Profile,
    factor: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    max_mode: f64,
    resolution: usize,
) -> Result<ConformalBound> {
    let t_len = base.length();
    let bad = (0..=256)
        .map(|i| factor(t_len * i as f64 / 256.0))
        .find(|f| !(*f > 0.0 && f.is_finite()));
    if let Some(f) = bad {
        return Err(GeoError::NonPositive { what: format!("conformal factor F = {f}") });
    }
    let profile: Profile = Arc::new(Conformal { base, factor });
    let spec = revolution_dirac_spectrum(&RevolutionDiracProblem::new(profile, max_mode, resolution), 2)?;
    let lambda1 = spec.lambda1();
    Ok(ConformalBound { lambda1, margin: lambda1 - 0.5 })
}
