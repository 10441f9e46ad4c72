//! Coordinate charts, tensor fields, curvature and quadrature.

pub mod chart;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod metric;
pub mod pullback;
pub mod quadrature;

pub use chart::{ChartDomain, Point};
pub use field::{
    Analytic, Callback, Constant, Field, FieldValue, GridField, Jet, ScalarField, TensorField, VectorField,
};
pub use geometry::{
    christoffel, christoffel_from_jet, divergence_neg, divergence_neg_tensor, scalar_curvature,
    scalar_curvature_from_jet, Christoffel,
};
pub use linalg::{determinant, inverse, pairwise_sum, Mat};
pub use metric::{MetricField, MetricJet};
pub use pullback::{CoordinateMap, Pullback, SphericalMap};
pub use quadrature::{integrate, quadrature_weights, weights_1d};
