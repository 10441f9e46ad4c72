//! Spinor calculus on surfaces in flat space and Dirac spectra on surfaces
//! of revolution.

pub mod clifford;
pub mod dirac;
pub mod field;
pub mod holographic;
pub mod spectrum;

pub use clifford::{clifford_identities, inner, norm_sq, CliffordRep, Endo, IdentityCheck, IdentityReport, Spinor};
pub use dirac::{extrinsic_dirac_on_surface, extrinsic_dirac_samples, parallel_spinor_defect, reilly_identity_flat_ball, ReillyReport};
pub use field::{PolynomialSpinor, SpinorField};
pub use holographic::{holographic_inequality_check, standard_test_spinors, HolographicReport};
pub use spectrum::{
    conformal_bound_check, revolution_dirac_spectrum, sphere_dirac_spectrum, ConformalBound, Conformal, CurveProfile, DiracSpectrum,
    MeridianProfile, Profile, ProfileKind, RevolutionDiracProblem, RoundSphere, SpectrumEntry, Spheroid, TorusProfile, TorusSpin,
};
