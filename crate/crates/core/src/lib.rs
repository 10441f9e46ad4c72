//! Numerical toolkit for asymptotically flat initial data: constraint
//! densities, trapped-surface diagnostics, the Jang equation, quasi-local
//! masses and Dirac spectra on closed surfaces.

pub mod error;
pub mod initial_data;
pub mod jang;
pub mod mass;
pub mod scenario;
pub mod spin;
pub mod surface;
pub mod tensor;

pub use error::{GeoError, Result};
