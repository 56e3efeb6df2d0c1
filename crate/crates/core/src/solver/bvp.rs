//! Damped Newton solver for the curvature equation on a truncated
//! half-annulus `r_min < r < r_max`, with Dirichlet data on the two arcs
//! and the nonlinear Neumann condition on the two rays.
//!
//! In `x = ln r` the equation reads `u_xx + u_thth + e^{2 beta x} e^u = 0`
//! and the ray conditions become `u_th = c1 e^{beta x} e^{u/2}` at
//! `theta = 0` and `-u_th = c2 e^{beta x} e^{u/2}` at `theta = pi`.
//! Interior rows use the compact fourth-order nine-point scheme, ray rows a
//! fourth-order one-sided difference.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{z0_from_curvatures, BoundaryCurvatures, ConeParams, Gauge};
use crate::error::{Error, Result};
use crate::field::{ConformalField, PolarGrid, ScalarField};
use crate::solver::banded::BandMatrix;

/// One-sided first derivative, applied as `sum D1_ONE_SIDED[q] u_q / (12 h)`.
const D1_ONE_SIDED: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];

/// Give up on a continuation step once it has been halved this many times.
const MAX_STEP_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Damping {
    pub initial: f64,
    pub backtrack: f64,
    pub min_step: f64,
}

impl Default for Damping {
    fn default() -> Self {
        Damping {
            initial: 1.0,
            backtrack: 0.5,
            min_step: 1e-4,
        }
    }
}

/// Continuation path from an easy problem to the requested one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Homotopy {
    /// Start from the family member with the same curvatures and scale
    /// `reference_lambda`, then blend its arc values into the requested
    /// Dirichlet data.
    ArcData { reference_lambda: f64 },
    /// Scale both nonlinear terms by `eps` from 0 to 1, starting from the
    /// harmonic solution. Tends to land on the small solution of the
    /// truncated problem.
    SourceAmplitude,
}

impl Default for Homotopy {
    fn default() -> Self {
        Homotopy::ArcData { reference_lambda: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_r: usize,
    pub n_theta: usize,
    pub r_min: f64,
    pub r_max: f64,
    /// Sup-norm of the discrete residual at which Newton stops.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub homotopy_steps: usize,
    pub damping: Damping,
    pub homotopy: Homotopy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_r: 128,
            n_theta: 64,
            r_min: 0.05,
            r_max: 20.0,
            newton_tol: 1e-10,
            max_newton_iters: 50,
            homotopy_steps: 10,
            damping: Damping::default(),
            homotopy: Homotopy::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_r < 8 || self.n_theta < 8 {
            return bad(format!("grid must be at least 8x8 (got {}x{})", self.n_r, self.n_theta));
        }
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) {
            return bad(format!("need 0 < r_min < r_max (got {}, {})", self.r_min, self.r_max));
        }
        if !(self.newton_tol > 0.0) || self.max_newton_iters == 0 || self.homotopy_steps == 0 {
            return bad("newton_tol, max_newton_iters and homotopy_steps must be positive".into());
        }
        let d = self.damping;
        if !(d.initial > 0.0 && d.initial <= 1.0 && d.backtrack > 0.0 && d.backtrack < 1.0 && d.min_step > 0.0) {
            return bad(format!("invalid damping {d:?}"));
        }
        if let Homotopy::ArcData { reference_lambda } = self.homotopy {
            if !(reference_lambda.is_finite() && reference_lambda > 0.0) {
                return bad(format!("reference_lambda must be > 0 (got {reference_lambda})"));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<PolarGrid> {
        PolarGrid::log_uniform(self.r_min, self.r_max, self.n_r, self.n_theta)
    }
}

/// Values of `u` on the arcs `r = r_min` and `r = r_max`, one per angle.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletData {
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
}

impl DirichletData {
    /// Samples `field` on the two arcs of the solver grid.
    pub fn from_field<F: ConformalField + ?Sized>(field: &F, cfg: &SolverConfig) -> Result<Self> {
        let grid = cfg.grid()?;
        let (nr, nt) = grid.shape();
        let arc = |i: usize| -> Result<Vec<f64>> { (0..nt).map(|j| field.u(grid.point(i, j))).collect() };
        Ok(DirichletData {
            inner: arc(0)?,
            outer: arc(nr - 1)?,
        })
    }

    fn check(&self, n_theta: usize) -> Result<()> {
        if self.inner.len() != n_theta || self.outer.len() != n_theta {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet data need {n_theta} values per arc (got {} and {})",
                self.inner.len(),
                self.outer.len()
            )));
        }
        if self.inner.iter().chain(&self.outer).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Dirichlet data must be finite".into()));
        }
        Ok(())
    }

    fn blend(&self, other: &DirichletData, tau: f64) -> DirichletData {
        let mix = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (1.0 - tau) * x + tau * y).collect();
        DirichletData {
            inner: mix(&self.inner, &other.inner),
            outer: mix(&self.outer, &other.outer),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub field: ScalarField,
    /// Residual sup-norms of every Newton iteration, one list per solve.
    pub newton_histories: Vec<Vec<f64>>,
    /// Accepted continuation steps, including the initial solve.
    pub continuation_steps: usize,
    pub interior_residual: f64,
    pub boundary_residual: f64,
}

/// Discrete operator on the `(ln r, theta)` grid.
struct Discretization {
    nr: usize,
    nt: usize,
    dx: f64,
    dth: f64,
    c1: f64,
    c2: f64,
    /// `e^{2 beta x_i}` and `e^{beta x_i}`.
    source_weight: Vec<f64>,
    ray_weight: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Row {
    Dirichlet,
    Interior,
    Bottom,
    Top,
}

impl Discretization {
    fn new(cone: ConeParams, bc: BoundaryCurvatures, cfg: &SolverConfig) -> Self {
        let (nr, nt) = (cfg.n_r, cfg.n_theta);
        let (a, b) = (cfg.r_min.ln(), cfg.r_max.ln());
        let dx = (b - a) / (nr - 1) as f64;
        let beta = cone.beta();
        let xs: Vec<f64> = (0..nr).map(|i| a + dx * i as f64).collect();
        Discretization {
            nr,
            nt,
            dx,
            dth: std::f64::consts::PI / (nt - 1) as f64,
            c1: bc.c1,
            c2: bc.c2,
            source_weight: xs.iter().map(|x| (2.0 * beta * x).exp()).collect(),
            ray_weight: xs.iter().map(|x| (beta * x).exp()).collect(),
        }
    }

    fn len(&self) -> usize {
        self.nr * self.nt
    }

    fn row(&self, i: usize, j: usize) -> Row {
        if i == 0 || i == self.nr - 1 {
            Row::Dirichlet
        } else if j == 0 {
            Row::Bottom
        } else if j == self.nt - 1 {
            Row::Top
        } else {
            Row::Interior
        }
    }

    /// Tensor weights of `d_xx + d_thth + (dx^2 + dth^2)/12 d_xx d_thth`.
    fn stencil(&self) -> [[f64; 3]; 3] {
        let (hx, ht) = (self.dx * self.dx, self.dth * self.dth);
        let mixed = (hx + ht) / (12.0 * hx * ht);
        let one = [1.0, -2.0, 1.0];
        let mut w = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                w[a][b] = mixed * one[a] * one[b];
            }
        }
        for (a, &v) in one.iter().enumerate() {
            w[a][1] += v / hx;
            w[1][a] += v / ht;
        }
        w
    }

    /// Weights of the source average `f + (dx^2 d_xx f + dth^2 d_thth f) / 12`
    /// at offsets `(di, dj)`.
    const SOURCE: [(isize, isize, f64); 5] = [
        (0, 0, 2.0 / 3.0),
        (1, 0, 1.0 / 12.0),
        (-1, 0, 1.0 / 12.0),
        (0, 1, 1.0 / 12.0),
        (0, -1, 1.0 / 12.0),
    ];

    fn ray_coefficient(&self, row: Row) -> f64 {
        if row == Row::Bottom {
            self.c1
        } else {
            self.c2
        }
    }

    /// Ray row neighbours `(j, weight)` of the one-sided derivative, signed
    /// so that the row computes `u_th` at the bottom and `-u_th` at the top.
    fn ray_stencil(&self, row: Row) -> [(usize, f64); 5] {
        let mut out = [(0usize, 0.0); 5];
        for (q, w) in D1_ONE_SIDED.iter().enumerate() {
            let j = if row == Row::Bottom { q } else { self.nt - 1 - q };
            out[q] = (j, w / (12.0 * self.dth));
        }
        out
    }

    fn residual(&self, u: &[f64], eps: f64, g: &DirichletData) -> Vec<f64> {
        let nt = self.nt;
        let source: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(k, v)| eps * self.source_weight[k / nt] * v.exp())
            .collect();
        let w = self.stencil();
        let mut out = vec![0.0; self.len()];
        out.par_chunks_mut(nt).enumerate().for_each(|(i, chunk)| {
            for (j, slot) in chunk.iter_mut().enumerate() {
                let k = i * nt + j;
                *slot = match self.row(i, j) {
                    Row::Dirichlet => u[k] - if i == 0 { g.inner[j] } else { g.outer[j] },
                    Row::Interior => {
                        let mut acc = 0.0;
                        for (a, wa) in w.iter().enumerate() {
                            for (b, wab) in wa.iter().enumerate() {
                                acc += wab * u[(i + a - 1) * nt + j + b - 1];
                            }
                        }
                        for (di, dj, m) in Self::SOURCE {
                            let kk = ((i as isize + di) as usize) * nt + (j as isize + dj) as usize;
                            acc += m * source[kk];
                        }
                        acc
                    }
                    row => {
                        let mut acc = 0.0;
                        for (jj, wq) in self.ray_stencil(row) {
                            acc += wq * u[i * nt + jj];
                        }
                        acc - eps * self.ray_coefficient(row) * self.ray_weight[i] * (0.5 * u[k]).exp()
                    }
                };
            }
        });
        out
    }

    fn jacobian(&self, u: &[f64], eps: f64) -> BandMatrix {
        let nt = self.nt;
        let mut m = BandMatrix::zeros(self.len(), nt + 1, nt + 1);
        let w = self.stencil();
        for i in 0..self.nr {
            for j in 0..nt {
                let k = i * nt + j;
                match self.row(i, j) {
                    Row::Dirichlet => m.add(k, k, 1.0),
                    Row::Interior => {
                        for (a, wa) in w.iter().enumerate() {
                            for (b, wab) in wa.iter().enumerate() {
                                m.add(k, (i + a - 1) * nt + j + b - 1, *wab);
                            }
                        }
                        for (di, dj, wt) in Self::SOURCE {
                            let ii = (i as isize + di) as usize;
                            let kk = ii * nt + (j as isize + dj) as usize;
                            m.add(k, kk, wt * eps * self.source_weight[ii] * u[kk].exp());
                        }
                    }
                    row => {
                        for (jj, wq) in self.ray_stencil(row) {
                            m.add(k, i * nt + jj, wq);
                        }
                        let d = -0.5 * eps * self.ray_coefficient(row) * self.ray_weight[i] * (0.5 * u[k]).exp();
                        m.add(k, k, d);
                    }
                }
            }
        }
        m
    }

    /// Sup-norms of the residual over interior rows and over ray rows.
    fn split_norms(&self, r: &[f64]) -> (f64, f64) {
        let mut interior: f64 = 0.0;
        let mut rays: f64 = 0.0;
        for i in 0..self.nr {
            for j in 0..self.nt {
                let v = r[i * self.nt + j].abs();
                match self.row(i, j) {
                    Row::Interior => interior = interior.max(v),
                    Row::Bottom | Row::Top => rays = rays.max(v),
                    Row::Dirichlet => {}
                }
            }
        }
        (interior, rays)
    }
}

fn sup_norm(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Damped Newton from `u`; returns the residual history.
fn newton(disc: &Discretization, u: &mut Vec<f64>, eps: f64, g: &DirichletData, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let mut r = disc.residual(u, eps, g);
    let mut norm = sup_norm(&r);
    let mut history = vec![norm];
    for _ in 0..cfg.max_newton_iters {
        if norm <= cfg.newton_tol {
            return Ok(history);
        }
        let lu = disc.jacobian(u, eps).factorize()?;
        let mut du: Vec<f64> = r.iter().map(|v| -v).collect();
        lu.solve_in_place(&mut du);
        let mut t = cfg.damping.initial;
        loop {
            let trial: Vec<f64> = u.iter().zip(&du).map(|(a, b)| a + t * b).collect();
            let rt = disc.residual(&trial, eps, g);
            let nt = sup_norm(&rt);
            if nt.is_finite() && nt < (1.0 - 1e-4 * t) * norm {
                *u = trial;
                r = rt;
                norm = nt;
                break;
            }
            t *= cfg.damping.backtrack;
            if t < cfg.damping.min_step {
                return Err(Error::NoConvergence(format!(
                    "line search fell below step {} at residual {norm:e}",
                    cfg.damping.min_step
                )));
            }
        }
        history.push(norm);
    }
    if norm <= cfg.newton_tol {
        return Ok(history);
    }
    Err(Error::NoConvergence(format!(
        "{} Newton iterations left residual {norm:e} above {:e}",
        cfg.max_newton_iters, cfg.newton_tol
    )))
}

/// Runs `solve(tau)` for `tau` from `start` to 1 in uniform steps, halving
/// a step whenever its Newton solve fails.
fn continue_to_one<S>(steps: usize, mut solve: S) -> Result<usize>
where
    S: FnMut(f64) -> Result<bool>,
{
    let base = 1.0 / steps as f64;
    let mut dt = base;
    let mut tau = 0.0;
    let mut accepted = 0;
    while tau < 1.0 {
        let next = if tau + dt > 1.0 - 1e-12 { 1.0 } else { tau + dt };
        if solve(next)? {
            tau = next;
            accepted += 1;
        } else {
            dt *= 0.5;
            if dt < base / f64::from(1u32 << MAX_STEP_HALVINGS) {
                return Err(Error::NoConvergence(format!("continuation stalled at parameter {tau}")));
            }
        }
    }
    Ok(accepted)
}

/// Newton solve that turns a convergence failure into `Ok(None)` so the
/// caller can shorten its continuation step.
fn attempt(
    disc: &Discretization,
    start: &[f64],
    eps: f64,
    g: &DirichletData,
    cfg: &SolverConfig,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let mut u = start.to_vec();
    match newton(disc, &mut u, eps, g, cfg) {
        Ok(h) => Ok(Some((u, h))),
        Err(Error::NoConvergence(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn dirichlet_initial(disc: &Discretization, g: &DirichletData) -> Vec<f64> {
    let mut u = vec![0.0; disc.len()];
    u[..disc.nt].copy_from_slice(&g.inner);
    u[(disc.nr - 1) * disc.nt..].copy_from_slice(&g.outer);
    u
}

/// Solves the truncated problem and returns the field with convergence
/// diagnostics.
pub fn solve_bvp_report(
    cone: ConeParams,
    bc: BoundaryCurvatures,
    dirichlet: &DirichletData,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    dirichlet.check(cfg.n_theta)?;
    let grid = cfg.grid()?;
    let disc = Discretization::new(cone, bc, cfg);
    let mut histories = Vec::new();

    let (u, steps) = match cfg.homotopy {
        Homotopy::ArcData { reference_lambda } => {
            let reference = z0_from_curvatures(cone, bc, reference_lambda, None)?;
            let start = ScalarField::sample(grid.clone(), &reference, Gauge::Punctured)?;
            let g_ref = DirichletData::from_field(&reference, cfg)?;
            let mut u = start.values().to_vec();
            histories.push(newton(&disc, &mut u, 1.0, &g_ref, cfg)?);
            let steps = continue_to_one(cfg.homotopy_steps, |tau| {
                let g = g_ref.blend(dirichlet, tau);
                Ok(match attempt(&disc, &u, 1.0, &g, cfg)? {
                    Some((next, h)) => {
                        u = next;
                        histories.push(h);
                        true
                    }
                    None => false,
                })
            })?;
            (u, steps + 1)
        }
        Homotopy::SourceAmplitude => {
            let mut u = dirichlet_initial(&disc, dirichlet);
            histories.push(newton(&disc, &mut u, 0.0, dirichlet, cfg)?);
            let steps = continue_to_one(cfg.homotopy_steps, |eps| {
                Ok(match attempt(&disc, &u, eps, dirichlet, cfg)? {
                    Some((next, h)) => {
                        u = next;
                        histories.push(h);
                        true
                    }
                    None => false,
                })
            })?;
            (u, steps + 1)
        }
    };

    let (interior_residual, boundary_residual) = disc.split_norms(&disc.residual(&u, 1.0, dirichlet));
    Ok(SolveReport {
        field: ScalarField::new(grid, u, Gauge::Punctured, cone)?,
        newton_histories: histories,
        continuation_steps: steps,
        interior_residual,
        boundary_residual,
    })
}

pub fn solve_bvp(
    cone: ConeParams,
    bc: BoundaryCurvatures,
    dirichlet: &DirichletData,
    cfg: &SolverConfig,
) -> Result<ScalarField> {
    Ok(solve_bvp_report(cone, bc, dirichlet, cfg)?.field)
}

/// Residual of the `eps = 0` problem solved from zero: a single linear
/// solve of the discrete Laplace problem.
pub fn harmonic_solve(cone: ConeParams, dirichlet: &DirichletData, cfg: &SolverConfig) -> Result<(ScalarField, usize)> {
    cfg.validate()?;
    dirichlet.check(cfg.n_theta)?;
    let disc = Discretization::new(cone, BoundaryCurvatures::zero(), cfg);
    let mut u = vec![0.0; disc.len()];
    let history = newton(&disc, &mut u, 0.0, dirichlet, cfg)?;
    Ok((ScalarField::new(cfg.grid()?, u, Gauge::Punctured, cone)?, history.len() - 1))
}
