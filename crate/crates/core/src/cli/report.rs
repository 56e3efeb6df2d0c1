//! JSON documents written by the subcommands.

use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::Serialize;

use crate::conformal::{BoundaryCurvatures, ConeParams, FamilyParams};
use crate::error::Result;
use crate::geometry::{
    boundary_residual, h_boundary_residual, h_interior_residual, interior_residual, inversion_symmetry_residual,
    projective_connection, sample_points, scalar_curvature, ResidualMode,
};
use crate::quadrature::{EnergyReport, PohozaevReport};
use crate::solver::{FitResult, SolveReport, SolverConfig};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Number of sample points per pointwise check.
const SAMPLES: usize = 100;
const INVERSION_TOL: f64 = 1e-11;

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub residual_norm: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, residual_norm: f64, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            residual_norm,
            tolerance,
            pass: residual_norm.is_finite() && residual_norm <= tolerance,
        }
    }

    /// A check whose computation itself failed.
    pub fn failed(name: &str, tolerance: f64) -> Self {
        Check {
            name: name.to_string(),
            residual_norm: f64::INFINITY,
            tolerance,
            pass: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsSummary {
    pub alpha: f64,
    pub lambda: f64,
    pub s0: f64,
    pub t0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ParamsSummary {
    pub fn new(fam: &FamilyParams, bc: BoundaryCurvatures) -> Self {
        ParamsSummary {
            alpha: fam.cone().alpha(),
            lambda: fam.lambda(),
            s0: fam.z0().re,
            t0: fam.z0().im,
            c1: bc.c1,
            c2: bc.c2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: &'static str,
    pub timestamp: u64,
    pub command: &'static str,
    pub params: ParamsSummary,
    pub checks: Vec<Check>,
    pub d_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pohozaev: Option<Vec<PohozaevReport>>,
    pub warnings: Vec<String>,
    pub all_pass: bool,
}

impl Report {
    pub fn new(
        command: &'static str,
        params: ParamsSummary,
        checks: Vec<Check>,
        d_value: Option<f64>,
        warnings: Vec<String>,
    ) -> Self {
        let all_pass = checks.iter().all(|c| c.pass);
        Report {
            tool_version: TOOL_VERSION,
            timestamp: now(),
            command,
            params,
            checks,
            d_value,
            pohozaev: None,
            warnings,
            all_pass,
        }
    }
}

/// Largest value of `f` over `points`; any evaluation error fails the check.
fn worst<F: Fn(Complex64) -> Result<f64>>(points: &[Complex64], f: F) -> Option<f64> {
    points.iter().try_fold(0.0f64, |m, z| f(*z).ok().map(|v| m.max(v)))
}

fn check(name: &str, value: Option<f64>, tol: f64) -> Check {
    match value {
        Some(v) => Check::new(name, v, tol),
        None => Check::failed(name, tol),
    }
}

/// Residual checks at quasi-random points with `0.1 <= r <= 10`; boundary
/// checks use `s = +-r` alternately.
pub fn pointwise_checks(fam: &FamilyParams, tol: f64) -> Vec<Check> {
    let pts = sample_points(SAMPLES, 0.1, 10.0);
    let ray = |k: usize, z: Complex64| if k.is_multiple_of(2) { z.norm() } else { -z.norm() };
    let boundary = |f: &dyn Fn(f64) -> Result<f64>| -> Option<f64> {
        pts.iter()
            .enumerate()
            .try_fold(0.0f64, |m, (k, z)| f(ray(k, *z)).ok().map(|v| m.max(v.abs())))
    };
    let mut out = vec![
        check(
            "interior_pde",
            worst(&pts, |z| Ok(interior_residual(z, fam, ResidualMode::Analytic)?.abs())),
            tol,
        ),
        check("boundary_neumann", boundary(&|s| boundary_residual(s, fam)), tol),
        check("h_interior", worst(&pts, |z| Ok(h_interior_residual(z, fam)?.norm())), tol),
        check("h_boundary", boundary(&|s| h_boundary_residual(s, fam)), tol),
        check(
            "projective_connection",
            worst(&pts, |z| Ok(projective_connection(z, fam, ResidualMode::Analytic)?.deviation())),
            tol,
        ),
        check(
            "scalar_curvature",
            worst(&pts, |z| Ok((scalar_curvature(z, fam, ResidualMode::Analytic)? - 1.0).abs())),
            tol,
        ),
    ];
    if fam.centered_at_origin() {
        out.push(check(
            "inversion_symmetry",
            worst(&pts, |z| Ok(inversion_symmetry_residual(z, fam)?.abs())),
            INVERSION_TOL,
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyDocument {
    pub tool_version: &'static str,
    pub timestamp: u64,
    pub params: ParamsSummary,
    pub energy: EnergyReport,
    pub expected_d: f64,
    pub warnings: Vec<String>,
}

impl EnergyDocument {
    pub fn new(params: ParamsSummary, energy: EnergyReport, warnings: Vec<String>) -> Self {
        let expected_d = 4.0 + 4.0 * params.alpha;
        EnergyDocument {
            tool_version: TOOL_VERSION,
            timestamp: now(),
            params,
            energy,
            expected_d,
            warnings,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub tool_version: &'static str,
    pub timestamp: u64,
    pub params: ParamsSummary,
    pub grid: (usize, usize),
    pub domain: (f64, f64),
    pub sup_error: f64,
    pub interior_residual: f64,
    pub boundary_residual: f64,
    pub continuation_steps: usize,
    pub newton_iterations: usize,
    pub warnings: Vec<String>,
}

impl SolveSummary {
    pub fn new(
        params: ParamsSummary,
        cfg: &SolverConfig,
        rep: &SolveReport,
        sup_error: f64,
        warnings: Vec<String>,
    ) -> Self {
        SolveSummary {
            tool_version: TOOL_VERSION,
            timestamp: now(),
            params,
            grid: (cfg.n_r, cfg.n_theta),
            domain: (cfg.r_min, cfg.r_max),
            sup_error,
            interior_residual: rep.interior_residual,
            boundary_residual: rep.boundary_residual,
            continuation_steps: rep.continuation_steps,
            newton_iterations: rep.newton_histories.iter().map(|h| h.len() - 1).sum(),
            warnings,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitDocument {
    pub tool_version: &'static str,
    pub timestamp: u64,
    pub alpha: f64,
    pub samples: usize,
    pub fit: FitResult,
}

impl FitDocument {
    pub fn new(cone: ConeParams, samples: usize, fit: FitResult) -> Self {
        FitDocument {
            tool_version: TOOL_VERSION,
            timestamp: now(),
            alpha: cone.alpha(),
            samples,
            fit,
        }
    }
}
