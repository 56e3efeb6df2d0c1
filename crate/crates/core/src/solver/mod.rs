//! Numerical solution of the truncated boundary value problem and
//! least-squares fitting of family parameters.

pub mod banded;
pub mod bvp;
pub mod fit;

pub use bvp::{solve_bvp, solve_bvp_report, Damping, DirichletData, Homotopy, SolveReport, SolverConfig};
pub use fit::{fit_family, FitResult};
