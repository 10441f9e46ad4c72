//! Closed 2-surfaces in a data chart: induced metric, shape operator, mean
//! curvature, null expansions, causal classification and the Euclidean
//! comparison mean curvature.

mod comparison;
mod expansions;
pub mod families;
mod geometry;
mod report;

pub use comparison::{comparison_h0, flat_metric_for, ComparisonReport, EuclideanImmersion};
pub use expansions::{classify, dichotomy_check, null_expansions, CausalClass, Classification, ClassCounts, Dichotomy, NullExpansionField, PointClass};
pub use geometry::{induced_metric, trace_sigma_k, trace_sigma_k_via_normal, SurfaceGeometry};
pub use report::{surface_report, SurfaceReport};

use crate::tensor::{ChartDomain, Field, GridField, Point};
use serde::Serialize;
use std::sync::Arc;

pub type Vec3 = Point<3>;
pub type EmbeddingMap = Arc<dyn Field<2, Vec3>>;
/// Coordinate vector at a surface point pointing out of the enclosed domain,
/// as a function of (parameter, position).
pub type OutwardHint = Arc<dyn Fn(&Point<2>, &Vec3) -> Vec3 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// (theta, phi) with closed theta axis ending at the poles, periodic phi.
    Sphere,
    /// Both axes periodic.
    Torus,
    /// Open piece of a surface; no pole handling.
    Patch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Inner,
    Outer,
}

#[derive(Clone)]
pub struct SurfaceEmbedding {
    pub label: String,
    pub domain: ChartDomain<2>,
    pub topology: Topology,
    pub map: EmbeddingMap,
    pub orientation: Orientation,
    pub outward_hint: Option<OutwardHint>,
}

impl std::fmt::Debug for SurfaceEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SurfaceEmbedding")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("topology", &self.topology)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl SurfaceEmbedding {
    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    /// Same surface with the map replaced by its node samples, so that all
    /// derivatives come from grid stencils.
    pub fn sampled(&self) -> crate::Result<Self> {
        let grid = GridField::sample(self.domain.clone(), self.map.as_ref())?;
        Ok(Self { map: Arc::new(grid), label: format!("{} [sampled]", self.label), ..self.clone() })
    }

    /// Whether node `k` is a coordinate pole.
    pub fn is_pole(&self, k: usize) -> bool {
        if self.topology != Topology::Sphere {
            return false;
        }
        let j = self.domain.multi_index(k)[0];
        j == 0 || j + 1 == self.domain.nodes()[0]
    }
}
