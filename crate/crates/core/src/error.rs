use thiserror::Error;

/// Errors produced by the geometric kernels and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("point {point:?} lies outside the chart domain")]
    PointOutsideChart { point: Vec<f64> },
    #[error("metric is not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },
    #[error("point {point:?} is not a grid node")]
    OffGrid { point: Vec<f64> },
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("degenerate immersion at parameter {param:?}")]
    DegenerateImmersion { param: Vec<f64> },
    #[error("surface orientation could not be resolved: {0}")]
    OrientationUnresolved(String),
    #[error("mean curvature vector vanishes or is not spacelike at {count} point(s)")]
    ZeroNormMeanCurvature { count: usize },
    #[error("{what} must be positive but vanishes or changes sign")]
    NonPositive { what: String },
    #[error("comparison immersion is not an isometry (defect {defect:.3e})")]
    NonIsometric { defect: f64 },
    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),
    #[error("gradient blow-up suspected: |du| = {gradient:.3e} at node {node}")]
    BlowUpSuspected { node: usize, gradient: f64 },
    #[error("linear solve failed: {0}")]
    SingularJacobian(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("degenerate meridian profile: {0}")]
    ProfileDegenerate(String),
    #[error("mode range insufficient: lowest eigenvalue found at boundary mode {mode}")]
    ModeRangeInsufficient { mode: f64 },
    #[error("infeasible scenario: {0}")]
    Infeasible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;
