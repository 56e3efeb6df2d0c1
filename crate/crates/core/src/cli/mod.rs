//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! invalid parameters or unreadable input, 3 for other runtime failures
//! such as I/O errors or solver breakdown.

pub mod config;
pub mod csvio;
pub mod report;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::conformal::{z0_from_curvatures, BoundaryCurvatures, ConeParams, FamilyParams, Gauge};
use crate::error::{Error, Result};
use crate::field::{PolarGrid, ScalarField};
use crate::quadrature::{d_identity, pohozaev_residual, QuadratureConfig};
use crate::solver::{fit_family, solve_bvp_report, DirichletData, SolverConfig};

use config::{parse_grid, read_config, Settings};
use report::{Check, ParamsSummary, Report};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED_CHECKS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Default pointwise residual tolerance.
const DEFAULT_TOL: f64 = 1e-8;
const DEFAULT_RADII: [f64; 4] = [0.5, 2.0, 5.0, 20.0];

#[derive(Debug, Parser)]
#[command(name = "corner-liouville", version, about = "Constant-curvature metrics with a conical corner on the half-plane")]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the residual, energy and Pohozaev checks for one family member.
    Verify(Common),
    /// Energy integrals and the resulting d.
    Energy(Common),
    /// Pohozaev identity on half-discs (radii via --radius).
    Pohozaev(Common),
    /// Write the closed-form u on a polar grid as CSV.
    Export(Common),
    /// Solve the truncated problem with closed-form arc data.
    Solve(Common),
    /// Fit family parameters to a CSV field given by --input.
    Fit(Common),
}

#[derive(Debug, Args, Default)]
struct Common {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c2: Option<f64>,
    /// Center abscissa; only free for integer alpha.
    #[arg(long, allow_negative_numbers = true)]
    s0: Option<f64>,
    /// Grid size as NRxNT.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    /// Input CSV for `fit`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Half-disc radius for `pohozaev`; repeatable.
    #[arg(long)]
    radius: Vec<f64>,
}

impl Common {
    fn settings(&self) -> Result<Settings> {
        let flags = Settings {
            alpha: self.alpha,
            lambda: self.lambda,
            c1: self.c1,
            c2: self.c2,
            s0: self.s0,
            grid: self.grid.as_deref().map(parse_grid).transpose()?,
            rmin: self.rmin,
            rmax: self.rmax,
            out: self.out.clone(),
            tol: self.tol,
            input: self.input.clone(),
            radius: (!self.radius.is_empty()).then(|| self.radius.clone()),
        };
        match &self.config {
            Some(path) => Ok(flags.or(read_config(path)?)),
            None => Ok(flags),
        }
    }
}

/// Fully resolved family parameters.
struct Resolved {
    cone: ConeParams,
    bc: BoundaryCurvatures,
    fam: FamilyParams,
    warnings: Vec<String>,
}

fn resolve(s: &Settings) -> Result<Resolved> {
    let cone = ConeParams::new(s.alpha.unwrap_or(0.0))?;
    let bc = BoundaryCurvatures::new(s.c1.unwrap_or(0.0), s.c2.unwrap_or(0.0))?;
    let lambda = s.lambda.unwrap_or(1.0);
    if s.s0.is_some() && !cone.is_integer() {
        return Err(Error::InvalidParameter(
            "s0 is determined by the curvatures unless alpha is an integer".into(),
        ));
    }
    let fam = z0_from_curvatures(cone, bc, lambda, s.s0)?;
    let mut warnings = Vec::new();
    if cone.is_near_integer() && !cone.is_integer() {
        warnings.push(format!(
            "alpha = {} is within 1e-6 of an integer; the center is ill-conditioned",
            cone.alpha()
        ));
    }
    Ok(Resolved { cone, bc, fam, warnings })
}

fn tolerance(s: &Settings) -> Result<f64> {
    let tol = s.tol.unwrap_or(DEFAULT_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive (got {tol})")));
    }
    Ok(tol)
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::IncompatibleCurvatures { .. } | Error::Parse(_) | Error::Domain(_) => {
            EXIT_INVALID
        }
        Error::NotInFamily { .. } => EXIT_FAILED_CHECKS,
        _ => EXIT_RUNTIME,
    }
}

/// Sends `text` to `--out` when given, otherwise to `stdout`.
fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn verify(s: &Settings, stdout: &mut dyn Write) -> Result<i32> {
    let r = resolve(s)?;
    let tol = tolerance(s)?;
    let mut checks = report::pointwise_checks(&r.fam, tol);
    let mut warnings = r.warnings;
    if !r.fam.centered_at_origin() {
        warnings.push("inversion symmetry skipped: center is not at the origin".into());
    }
    let quad = QuadratureConfig::default();
    let expected = r.cone.decay_rate();
    let d_value = match d_identity(&r.fam, &quad) {
        Ok(rep) => {
            checks.push(Check::new("d_identity", (rep.d_value - expected).abs(), 1e-6 * expected));
            checks.push(Check::new("d_lower_bound", (2.0 * r.cone.beta() - rep.d_value).max(0.0), 0.0));
            Some(rep.d_value)
        }
        Err(e) => {
            warnings.push(format!("d_identity: {e}"));
            checks.push(Check::failed("d_identity", 1e-6 * expected));
            None
        }
    };
    let mut worst: f64 = 0.0;
    let mut failed = false;
    for radius in s.radius.clone().unwrap_or(DEFAULT_RADII.to_vec()) {
        match pohozaev_residual(&r.fam, radius, &quad) {
            Ok(p) => worst = worst.max(p.residual),
            Err(e) => {
                warnings.push(format!("pohozaev at R = {radius}: {e}"));
                failed = true;
            }
        }
    }
    checks.push(if failed {
        Check::failed("pohozaev", 1e-6)
    } else {
        Check::new("pohozaev", worst, 1e-6)
    });
    let rep = Report::new("verify", ParamsSummary::new(&r.fam, r.bc), checks, d_value, warnings);
    emit(s.out.as_deref(), &to_json(&rep)?, stdout)?;
    Ok(if rep.all_pass { EXIT_PASS } else { EXIT_FAILED_CHECKS })
}

fn energy(s: &Settings, stdout: &mut dyn Write) -> Result<i32> {
    let r = resolve(s)?;
    let rep = d_identity(&r.fam, &QuadratureConfig::default())?;
    let doc = report::EnergyDocument::new(ParamsSummary::new(&r.fam, r.bc), rep, r.warnings);
    emit(s.out.as_deref(), &to_json(&doc)?, stdout)?;
    Ok(EXIT_PASS)
}

fn pohozaev(s: &Settings, stdout: &mut dyn Write) -> Result<i32> {
    let r = resolve(s)?;
    let radii = s.radius.clone().unwrap_or(DEFAULT_RADII.to_vec());
    let quad = QuadratureConfig::default();
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for radius in radii {
        let p = pohozaev_residual(&r.fam, radius, &quad)?;
        checks.push(Check::new(&format!("pohozaev_R={radius}"), p.residual, 1e-6));
        rows.push(p);
    }
    let mut rep = Report::new("pohozaev", ParamsSummary::new(&r.fam, r.bc), checks, None, r.warnings);
    rep.pohozaev = Some(rows);
    emit(s.out.as_deref(), &to_json(&rep)?, stdout)?;
    Ok(if rep.all_pass { EXIT_PASS } else { EXIT_FAILED_CHECKS })
}

fn write_csv(field: &ScalarField, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            csvio::write_field(field, BufWriter::new(f))
        }
        None => csvio::write_field(field, stdout),
    }
}

fn export(s: &Settings, stdout: &mut dyn Write) -> Result<i32> {
    let r = resolve(s)?;
    let (nr, nt) = s.grid.unwrap_or((16, 9));
    let grid = PolarGrid::log_uniform(s.rmin.unwrap_or(0.1), s.rmax.unwrap_or(10.0), nr, nt)?;
    let field = ScalarField::sample(grid, &r.fam, Gauge::Punctured)?;
    write_csv(&field, s.out.as_deref(), stdout)?;
    Ok(EXIT_PASS)
}

fn solve(s: &Settings, stdout: &mut dyn Write) -> Result<i32> {
    let r = resolve(s)?;
    let (n_r, n_theta) = s.grid.unwrap_or((128, 64));
    let cfg = SolverConfig {
        n_r,
        n_theta,
        r_min: s.rmin.unwrap_or(0.05),
        r_max: s.rmax.unwrap_or(20.0),
        ..SolverConfig::default()
    };
    let out = s
        .out
        .clone()
        .ok_or_else(|| Error::InvalidParameter("solve needs --out for the field CSV".into()))?;
    let dirichlet = DirichletData::from_field(&r.fam, &cfg)?;
    let rep = solve_bvp_report(r.cone, r.bc, &dirichlet, &cfg)?;
    let sup_error = rep.field.sup_error(&r.fam)?;
    write_csv(&rep.field, Some(&out), stdout)?;
    let summary = report::SolveSummary::new(ParamsSummary::new(&r.fam, r.bc), &cfg, &rep, sup_error, r.warnings);
    let json = to_json(&summary)?;
    let mut summary_path = out.into_os_string();
    summary_path.push(".json");
    emit(Some(Path::new(&summary_path)), &json, stdout)?;
    stdout.write_all(json.as_bytes())?;
    Ok(EXIT_PASS)
}

fn fit(s: &Settings, stdout: &mut dyn Write) -> Result<i32> {
    let cone = ConeParams::new(s.alpha.unwrap_or(0.0))?;
    let path = s
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("fit needs --input with a field CSV".into()))?;
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let rows = csvio::read_rows(BufReader::new(file))?;
    let samples: Vec<(Complex64, f64)> = rows
        .iter()
        .filter(|row| row.theta > 0.0 && row.theta < std::f64::consts::PI)
        .map(|row| (Complex64::from_polar(row.r, row.theta), row.u))
        .collect();
    let result = fit_family(&samples, cone)?;
    let doc = report::FitDocument::new(cone, samples.len(), result);
    emit(s.out.as_deref(), &to_json(&doc)?, stdout)?;
    Ok(EXIT_PASS)
}

type Handler = fn(&Settings, &mut dyn Write) -> Result<i32>;

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
        }
    };
    let (common, f): (&Common, Handler) = match &cli.command {
        Command::Verify(c) => (c, verify),
        Command::Energy(c) => (c, energy),
        Command::Pohozaev(c) => (c, pohozaev),
        Command::Export(c) => (c, export),
        Command::Solve(c) => (c, solve),
        Command::Fit(c) => (c, fit),
    };
    match common.settings().and_then(|s| f(&s, stdout)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
