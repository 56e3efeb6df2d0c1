//! Constant-curvature conformal metrics on the upper half-plane with a
//! conical corner at the origin and constant Neumann data on the two
//! boundary rays.
//!
//! The crate evaluates the closed-form solution family, checks the
//! differential and integral identities it satisfies, solves the truncated
//! boundary value problem numerically and fits family parameters to sampled
//! fields.

pub mod cli;
pub mod conformal;
pub mod error;
pub mod field;
pub mod geometry;
pub mod numdiff;
pub mod quadrature;
pub mod solver;

pub use conformal::{BoundaryCurvatures, ConeParams, FamilyParams, Gauge};
pub use error::{Error, Result};
pub use field::{ConformalField, PolarGrid, ScalarField};
