//! Scenario files: initial data, a surface, its Euclidean comparison, an
//! optional Jang domain and numerical settings.
//!
//! Scenarios are JSON documents with a `schema_version`. Every physical
//! parameter is a string `"<decimal> <unit>"` in geometric units, where the
//! unit is `L` (length), `1/L` (inverse length) or `1` (dimensionless).

mod quantity;

pub use quantity::{Dimensionless, InverseLength, Length, Quantity, Unit};

use crate::error::{GeoError, Result};
use crate::initial_data::InitialDataSet;
use crate::jang::{JangDomain, JangOptions};
use crate::mass::schwarzschild;
use crate::spin::{Profile, RoundSphere, Spheroid, TorusProfile};
use crate::surface::families::{coordinate_sphere, graph_over_sphere, spheroid, torus, HarmonicTerm};
use crate::surface::{EuclideanImmersion, SurfaceEmbedding, SurfaceGeometry, Vec3};
use crate::tensor::{ChartDomain, Mat};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub data: DataSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub numerics: Numerics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Flat,
    Schwarzschild { mass: Quantity<Length> },
    ConstantTrace { c: Quantity<InverseLength> },
    /// Gridded `g` and `K` read from a JSON table, path relative to the
    /// scenario file.
    CustomTable { path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpec {
    pub l: u32,
    pub m: i32,
    pub amplitude: Quantity<Length>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    CoordinateSphere { radius: Quantity<Length> },
    Spheroid { a: Quantity<Length>, c: Quantity<Length> },
    Torus { major: Quantity<Length>, minor: Quantity<Length> },
    GraphOverSphere { radius: Quantity<Length>, terms: Vec<HarmonicSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComparisonSpec {
    /// The surface's coordinate map read in Euclidean space.
    Identity,
    RoundSphere { radius: Quantity<Length> },
    /// Round sphere with the area of the surface.
    EqualAreaSphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Box { lower: [Quantity<Length>; 3], upper: [Quantity<Length>; 3] },
    Ball { radius: Quantity<Length>, excision: Quantity<Length> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonSpec {
    pub max_newton: usize,
    pub damping: Quantity<Dimensionless>,
    pub continuation_steps: usize,
}

impl Default for NewtonSpec {
    fn default() -> Self {
        let d = JangOptions::default();
        Self { max_newton: d.max_newton, damping: Quantity::new(d.damping), continuation_steps: d.continuation_steps }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Polar intervals of sphere grids (`(n + 1) x n` nodes), or nodes per
    /// axis of torus grids.
    pub surface_resolution: usize,
    /// Nodes per axis of constraint sweeps.
    pub constraint_resolution: usize,
    /// Nodes per axis of a Jang box, or radial nodes of a Jang ball.
    pub jang_resolution: usize,
    pub dirac_resolution: usize,
    pub dirac_max_mode: Quantity<Dimensionless>,
    /// Relative tolerance for asserted inequalities.
    pub tolerance: Quantity<Dimensionless>,
    pub newton: NewtonSpec,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            surface_resolution: 64,
            constraint_resolution: 16,
            jang_resolution: 17,
            dirac_resolution: 800,
            dirac_max_mode: Quantity::new(4.5),
            tolerance: Quantity::new(1e-8),
            newton: NewtonSpec::default(),
        }
    }
}

/// Contents of a `custom_table` file; tensors as `[xx, xy, xz, yy, yz, zz]`
/// per node, last axis fastest.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataTable {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub nodes: [usize; 3],
    pub g: Vec<[f64; 6]>,
    pub k: Vec<[f64; 6]>,
}

fn sym(c: &[f64; 6]) -> Mat<3> {
    Mat::<3>::new(c[0], c[1], c[2], c[1], c[3], c[4], c[2], c[4], c[5])
}

fn positive(what: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(GeoError::Parse(format!("{what} must be positive, got {v}")))
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| GeoError::Parse(e.to_string()))?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(GeoError::Parse(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                s.schema_version
            )));
        }
        if s.name.is_empty() || s.name.contains(['/', '\\']) {
            return Err(GeoError::Parse(format!("scenario name {:?} must be a non-empty file stem", s.name)));
        }
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("scenario serializes");
        out.push('\n');
        out
    }

    fn validate(&self) -> Result<()> {
        if let DataSpec::Schwarzschild { mass } = &self.data {
            if mass.value() < 0.0 {
                return Err(GeoError::Parse("data.mass must be non-negative".into()));
            }
        }
        match &self.surface {
            Some(SurfaceSpec::CoordinateSphere { radius }) => {
                positive("surface.radius", radius.value())?;
            }
            Some(SurfaceSpec::Spheroid { a, c }) => {
                positive("surface.a", a.value())?;
                positive("surface.c", c.value())?;
            }
            Some(SurfaceSpec::Torus { major, minor }) => {
                if !(minor.value() > 0.0 && major.value() > minor.value()) {
                    return Err(GeoError::Parse("torus needs major > minor > 0".into()));
                }
            }
            Some(SurfaceSpec::GraphOverSphere { radius, terms }) => {
                positive("surface.radius", radius.value())?;
                if let Some(t) = terms.iter().find(|t| t.m.unsigned_abs() > t.l) {
                    return Err(GeoError::Parse(format!("harmonic term l = {}, m = {} needs |m| <= l", t.l, t.m)));
                }
            }
            None => {}
        }
        if let Some(DomainSpec::Ball { radius, excision }) = &self.domain {
            if !(excision.value() > 0.0 && excision.value() < radius.value()) {
                return Err(GeoError::Parse("domain.excision must lie in (0, radius)".into()));
            }
        }
        let n = &self.numerics;
        if n.surface_resolution < 4 || n.constraint_resolution < 3 || n.jang_resolution < 5 || n.dirac_resolution < 8 {
            return Err(GeoError::Parse("numerics resolutions are too coarse".into()));
        }
        Ok(())
    }

    /// Largest coordinate extent of the surface and domain.
    pub fn extent(&self) -> f64 {
        let surface = match &self.surface {
            Some(SurfaceSpec::CoordinateSphere { radius }) => radius.value(),
            Some(SurfaceSpec::Spheroid { a, c }) => a.value().max(c.value()),
            Some(SurfaceSpec::Torus { major, minor }) => major.value() + minor.value(),
            Some(SurfaceSpec::GraphOverSphere { radius, terms }) => {
                radius.value() + terms.iter().map(|t| t.amplitude.value().abs() * 15.0).sum::<f64>()
            }
            None => 1.0,
        };
        let domain = match &self.domain {
            Some(DomainSpec::Box { lower, upper }) => {
                lower.iter().chain(upper.iter()).map(|q| q.value().abs()).fold(0.0, f64::max) * 3f64.sqrt()
            }
            Some(DomainSpec::Ball { radius, .. }) => radius.value(),
            None => 0.0,
        };
        surface.max(domain)
    }

    pub fn tolerance(&self) -> f64 {
        self.numerics.tolerance.value()
    }

    /// Initial data. Analytic families live on a cube containing the surface
    /// and domain; tables carry their own chart.
    pub fn initial_data(&self, base_dir: &Path) -> Result<InitialDataSet> {
        let half = 2.0 * self.extent();
        let chart = || ChartDomain::closed([-half; 3], [half; 3], [3; 3]);
        Ok(match &self.data {
            DataSpec::Flat => InitialDataSet::flat(chart()?),
            DataSpec::Schwarzschild { mass } => InitialDataSet::schwarzschild(mass.value(), chart()?),
            DataSpec::ConstantTrace { c } => InitialDataSet::constant_trace(c.value(), chart()?),
            DataSpec::CustomTable { path } => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| GeoError::Parse(format!("cannot read data table {}: {e}", full.display())))?;
                let t: DataTable = serde_json::from_str(&text)
                    .map_err(|e| GeoError::Parse(format!("data table {}: {e}", full.display())))?;
                let chart = ChartDomain::closed(t.lower, t.upper, t.nodes)?;
                if t.g.len() != chart.node_count() || t.k.len() != chart.node_count() {
                    return Err(GeoError::Parse(format!(
                        "data table {} has {} / {} samples for {} nodes",
                        full.display(),
                        t.g.len(),
                        t.k.len(),
                        chart.node_count()
                    )));
                }
                InitialDataSet::from_tables(
                    self.name.clone(),
                    chart,
                    t.g.iter().map(sym).collect(),
                    t.k.iter().map(sym).collect(),
                )?
            }
        })
    }

    /// Grid on which the constraint densities are swept: the table chart for
    /// gridded data (which can only be read at its nodes), the Jang box if
    /// present, otherwise a cube around the surface. An even node count
    /// keeps the origin off the grid.
    pub fn constraint_grid(&self, ids: &InitialDataSet) -> Result<ChartDomain<3>> {
        let n = self.numerics.constraint_resolution;
        if let DataSpec::CustomTable { .. } = self.data {
            return Ok(ids.chart().clone());
        }
        if let Some(DomainSpec::Box { lower, upper }) = &self.domain {
            return ChartDomain::closed(lower.clone().map(|q| q.value()), upper.clone().map(|q| q.value()), [n; 3]);
        }
        let half = self.extent();
        let n = n + n % 2;
        ChartDomain::closed([-half; 3], [half; 3], [n; 3])
    }

    pub fn surface(&self) -> Result<Option<SurfaceEmbedding>> {
        let n = self.numerics.surface_resolution;
        let o = Vec3::zeros();
        Ok(Some(match self.surface.as_ref() {
            None => return Ok(None),
            Some(SurfaceSpec::CoordinateSphere { radius }) => coordinate_sphere(o, radius.value(), n + 1, n)?,
            Some(SurfaceSpec::Spheroid { a, c }) => spheroid(o, a.value(), c.value(), n + 1, n)?,
            Some(SurfaceSpec::Torus { major, minor }) => torus(o, major.value(), minor.value(), n, n)?,
            Some(SurfaceSpec::GraphOverSphere { radius, terms }) => {
                let terms: Vec<HarmonicTerm> =
                    terms.iter().map(|t| HarmonicTerm { l: t.l, m: t.m, amplitude: t.amplitude.value() }).collect();
                graph_over_sphere(o, radius.value(), &terms, n + 1, n)?
            }
        }))
    }

    /// Comparison immersion. Without an explicit choice, flat-metric data use
    /// the identity and spheres in the Schwarzschild slice use the round
    /// sphere of equal area; other combinations have no default.
    pub fn comparison(&self, s: &SurfaceEmbedding, geo: &SurfaceGeometry) -> Result<Option<EuclideanImmersion>> {
        let spec = match (&self.comparison, &self.data, &self.surface) {
            (Some(c), _, _) => c.clone(),
            (None, DataSpec::Flat | DataSpec::ConstantTrace { .. }, _) => ComparisonSpec::Identity,
            (None, DataSpec::Schwarzschild { .. }, Some(SurfaceSpec::CoordinateSphere { .. })) => ComparisonSpec::EqualAreaSphere,
            _ => return Ok(None),
        };
        Ok(Some(match spec {
            ComparisonSpec::Identity => EuclideanImmersion::identity(s),
            ComparisonSpec::RoundSphere { radius } => {
                self.require_sphere_parameters("round_sphere comparison")?;
                EuclideanImmersion::round_sphere(&s.domain, radius.value())
            }
            ComparisonSpec::EqualAreaSphere => {
                self.require_sphere_parameters("equal_area_sphere comparison")?;
                EuclideanImmersion::round_sphere(&s.domain, (geo.area() / (4.0 * PI)).sqrt())
            }
        }))
    }

    fn require_sphere_parameters(&self, what: &str) -> Result<()> {
        match self.surface {
            Some(SurfaceSpec::Torus { .. }) | None => Err(GeoError::Infeasible(format!("{what} needs a sphere-type surface"))),
            _ => Ok(()),
        }
    }

    /// Closed-form `H0^2/H` mass when the scenario is a coordinate sphere of
    /// the Schwarzschild slice compared with the equal-area round sphere.
    pub fn closed_form_mass(&self) -> Option<f64> {
        match (&self.data, &self.surface, &self.comparison) {
            (
                DataSpec::Schwarzschild { mass },
                Some(SurfaceSpec::CoordinateSphere { radius }),
                None | Some(ComparisonSpec::EqualAreaSphere),
            ) => Some(schwarzschild::hmr(mass.value(), radius.value())),
            _ => None,
        }
    }

    pub fn jang_domain(&self) -> Result<Option<JangDomain>> {
        let n = self.numerics.jang_resolution;
        Ok(match &self.domain {
            None => None,
            Some(DomainSpec::Box { lower, upper }) => Some(JangDomain::cartesian_box(
                lower.clone().map(|q| q.value()),
                upper.clone().map(|q| q.value()),
                [n; 3],
            )?),
            Some(DomainSpec::Ball { radius, excision }) => {
                let nt = (n - 1) * 4 / 3;
                let nt = nt + nt % 2;
                Some(JangDomain::ball([0.0; 3], excision.value(), radius.value(), n, nt, 2 * (n - 1))?)
            }
        })
    }

    pub fn jang_options(&self) -> JangOptions {
        let nw = &self.numerics.newton;
        JangOptions {
            max_newton: nw.max_newton,
            damping: nw.damping.value(),
            continuation_steps: nw.continuation_steps,
            ..JangOptions::default()
        }
    }

    /// Intrinsic meridian profile for the reduced Dirac spectrum, when the
    /// surface is rotationally symmetric and its induced metric is known in
    /// closed form.
    pub fn dirac_profile(&self) -> Result<Profile> {
        let unsupported = || GeoError::Infeasible("Dirac spectra need a rotationally symmetric surface with known induced metric".into());
        let flat_metric = matches!(self.data, DataSpec::Flat | DataSpec::ConstantTrace { .. });
        Ok(match (&self.surface, &self.data) {
            (Some(SurfaceSpec::CoordinateSphere { radius }), DataSpec::Schwarzschild { mass }) => {
                Arc::new(RoundSphere { radius: schwarzschild::areal_radius(mass.value(), radius.value()) })
            }
            (Some(SurfaceSpec::CoordinateSphere { radius }), _) if flat_metric => Arc::new(RoundSphere { radius: radius.value() }),
            (Some(SurfaceSpec::Spheroid { a, c }), _) if flat_metric => Arc::new(Spheroid { a: a.value(), c: c.value() }),
            (Some(SurfaceSpec::Torus { major, minor }), _) if flat_metric => {
                Arc::new(TorusProfile { major: major.value(), minor: minor.value() })
            }
            (Some(SurfaceSpec::GraphOverSphere { radius, terms }), _) if flat_metric && terms.is_empty() => {
                Arc::new(RoundSphere { radius: radius.value() })
            }
            _ => return Err(unsupported()),
        })
    }

    /// Euclidean mean curvature of the Dirac profile as a function of the
    /// meridian parameter, for the conformal bound; sphere-type only.
    pub fn comparison_mean_curvature_profile(&self) -> Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
        let profile = self.dirac_profile().ok()?;
        match &self.surface {
            Some(SurfaceSpec::Spheroid { a, c }) => {
                let (a, c) = (a.value(), c.value());
                Some(Arc::new(move |t: f64| {
                    let q = (a * t.cos()).hypot(c * t.sin());
                    a * c / q.powi(3) + c / (a * q)
                }))
            }
            Some(SurfaceSpec::CoordinateSphere { .. } | SurfaceSpec::GraphOverSphere { .. }) => {
                let r = profile.rho(0.5 * profile.length());
                Some(Arc::new(move |_| 2.0 / r))
            }
            _ => None,
        }
    }

    /// Copy with one scalar parameter replaced: `r` (surface radius), `c`
    /// (constant trace) or `M` (Schwarzschild mass).
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut s = self.clone();
        match (name, &mut s.data, &mut s.surface) {
            ("r", _, Some(SurfaceSpec::CoordinateSphere { radius } | SurfaceSpec::GraphOverSphere { radius, .. })) => {
                *radius = Quantity::new(value)
            }
            ("c", DataSpec::ConstantTrace { c }, _) => *c = Quantity::new(value),
            ("M", DataSpec::Schwarzschild { mass }, _) => *mass = Quantity::new(value),
            _ => return Err(GeoError::Parse(format!("parameter {name:?} does not apply to scenario {:?}", s.name))),
        }
        s.validate()?;
        Ok(s)
    }
}

/// `a:b:n`, `n >= 1` evenly spaced values from `a` to `b` inclusive.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let bad = || GeoError::Parse(format!("range {spec:?} must read a:b:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// `name=a:b:n`.
pub fn parse_sweep(spec: &str) -> Result<(String, Vec<f64>)> {
    let (name, range) = spec
        .split_once('=')
        .ok_or_else(|| GeoError::Parse(format!("sweep {spec:?} must read name=a:b:n")))?;
    Ok((name.trim().to_string(), parse_range(range)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHW: &str = r#"{
        "schema_version": 1,
        "name": "schw",
        "data": {"family": "schwarzschild", "mass": "1 L"},
        "surface": {"family": "coordinate_sphere", "radius": "2.0 L"}
    }"#;

    #[test]
    fn round_trip_is_idempotent() {
        let s = Scenario::from_json(SCHW).unwrap();
        let once = s.to_json();
        let back = Scenario::from_json(&once).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_json(), once);
        assert!(once.contains("\"2.0 L\""));
    }

    #[test]
    fn errors_carry_positions() {
        let e = Scenario::from_json("{\n \"schema_version\": 1,\n \"name\": \"x\",\n \"data\": {\"family\": \"flat\"},\n \"oops\": 3\n}").unwrap_err();
        assert!(matches!(&e, GeoError::Parse(m) if m.contains("line 5")), "{e}");
        let e = Scenario::from_json(&SCHW.replace("\"1 L\"", "\"1 1/L\"")).unwrap_err();
        assert!(matches!(&e, GeoError::Parse(m) if m.contains("line 4") && m.contains("unit")), "{e}");
        let e = Scenario::from_json(&SCHW.replace("\"schema_version\": 1", "\"schema_version\": 7")).unwrap_err();
        assert!(matches!(e, GeoError::Parse(_)));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1:3:3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(parse_range("1:3").is_err());
        let (name, v) = parse_sweep("r=1:50:25").unwrap();
        assert_eq!((name.as_str(), v.len(), v[24]), ("r", 25, 50.0));
    }

    #[test]
    fn parameters_replace_values() {
        let s = Scenario::from_json(SCHW).unwrap();
        let t = s.with_parameter("r", 5.0).unwrap();
        assert_eq!(t.closed_form_mass().unwrap(), schwarzschild::hmr(1.0, 5.0));
        assert!(s.with_parameter("c", 0.1).is_err());
    }
}
