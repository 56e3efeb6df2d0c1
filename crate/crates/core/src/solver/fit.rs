//! Least-squares recovery of `(lambda, z0)` from samples of `u`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::conformal::{curvatures_from_z0, halfplane_polar, halfplane_power, BoundaryCurvatures, ConeParams, FamilyParams};
use crate::error::{Error, Result};

/// Maximum Gauss-Newton iterations per start.
const MAX_ITERS: usize = 200;
/// Fitted rms above this fraction of the value scale means no member fits.
const NOT_IN_FAMILY: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(skip)]
    pub fam: FamilyParams,
    pub lambda: f64,
    pub s0: f64,
    pub t0: f64,
    pub curvatures: BoundaryCurvatures,
    pub rms_residual: f64,
    pub iterations: usize,
    /// Variances of `(ln lambda, s0, t0)` from the Gauss-Newton normal matrix.
    pub covariance_diag: [f64; 3],
}

/// Precomputed `w = z^beta` for every sample.
struct Problem<'a> {
    cone: ConeParams,
    w: Vec<Complex64>,
    values: &'a [f64],
}

impl Problem<'_> {
    /// Residuals `model - data` and their Jacobian in `(ln lambda, s0, t0)`.
    fn evaluate(&self, p: [f64; 3], jac: Option<&mut Vec<[f64; 3]>>) -> Vec<f64> {
        let beta = self.cone.beta();
        let ln_big = beta * p[0];
        let l2 = (2.0 * ln_big).exp();
        let z0 = Complex64::new(p[1], p[2]);
        let prefactor = 8f64.ln() + 2.0 * beta.ln() + 2.0 * ln_big;
        let mut out = Vec::with_capacity(self.w.len());
        let mut rows = Vec::with_capacity(self.w.len());
        for (w, v) in self.w.iter().zip(self.values) {
            let d = w - z0;
            let q = l2 + d.norm_sqr();
            out.push(prefactor - 2.0 * q.ln() - v);
            rows.push([2.0 * beta * (1.0 - 2.0 * l2 / q), 4.0 * d.re / q, 4.0 * d.im / q]);
        }
        if let Some(j) = jac {
            *j = rows;
        }
        out
    }

    fn cost(&self, p: [f64; 3]) -> f64 {
        self.evaluate(p, None).iter().map(|r| r * r).sum()
    }
}

fn normal_equations(jac: &[[f64; 3]], r: &[f64]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut a = [[0.0; 3]; 3];
    let mut g = [0.0; 3];
    for (row, ri) in jac.iter().zip(r) {
        for i in 0..3 {
            g[i] += row[i] * ri;
            for j in 0..3 {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    (a, g)
}

/// Solves a symmetric 3x3 system by Gaussian elimination with pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

struct Run {
    p: [f64; 3],
    cost: f64,
    iterations: usize,
}

/// Damped Gauss-Newton: the normal matrix diagonal is inflated by `mu`
/// until a step lowers the cost.
fn gauss_newton(problem: &Problem, start: [f64; 3]) -> Result<Run> {
    let mut p = start;
    let mut jac = Vec::new();
    let mut r = problem.evaluate(p, Some(&mut jac));
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    for it in 0..MAX_ITERS {
        let (a, g) = normal_equations(&jac, &r);
        let mut accepted = false;
        while mu < 1e16 {
            let mut damped = a;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += mu * a[i][i].max(1e-12);
            }
            let Some(step) = solve3(damped, [-g[0], -g[1], -g[2]]) else {
                mu *= 10.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            let trial_cost = problem.cost(trial);
            if trial_cost.is_finite() && trial_cost <= cost {
                let small = step.iter().zip(&p).all(|(s, q)| s.abs() <= 1e-15 * (1.0 + q.abs()));
                let stalled = cost - trial_cost <= 1e-30 + 1e-15 * cost;
                p = trial;
                cost = trial_cost;
                r = problem.evaluate(p, Some(&mut jac));
                mu = (mu / 3.0).max(1e-12);
                accepted = true;
                if small || (stalled && mu <= 1e-9) {
                    return Ok(Run { p, cost, iterations: it + 1 });
                }
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            // no descent direction left: a stationary point
            return Ok(Run { p, cost, iterations: it + 1 });
        }
    }
    Err(Error::NoConvergence(format!(
        "Gauss-Newton did not settle in {MAX_ITERS} iterations (cost {cost:e})"
    )))
}

fn validate(samples: &[(Complex64, f64)]) -> Result<()> {
    if samples.len() < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 samples (got {})", samples.len())));
    }
    for (z, v) in samples {
        if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite() && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample ({z}, {v}) is not a finite value in the open half-plane"
            )));
        }
    }
    let r0 = samples[0].0.norm();
    if samples.iter().all(|(z, _)| (z.norm() - r0).abs() <= 1e-12 * r0) {
        return Err(Error::InvalidParameter("samples all lie on one circle about the corner".into()));
    }
    Ok(())
}

/// Starting points: the peak of the data read as the bump center, plus
/// centered members over a spread of scales.
fn starts(problem: &Problem) -> Vec<[f64; 3]> {
    let beta = problem.cone.beta();
    let (k, vmax) = problem
        .values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if *v > best.1 { (i, *v) } else { best });
    // peak value ln(8 beta^2 / Lambda^2)
    let ln_big = 0.5 * (8.0 * beta * beta).ln() - 0.5 * vmax;
    let peak = problem.w[k];
    let mut out = vec![[ln_big / beta, peak.re, peak.im]];
    for ln_lambda in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        out.push([ln_lambda, 0.0, 0.0]);
        out.push([ln_lambda, peak.re, peak.im]);
    }
    out
}

/// Fallback starts when the center lies outside the image sector and the
/// data has no interior peak: a polar lattice of centers in the w-plane.
fn lattice_starts(problem: &Problem) -> Vec<[f64; 3]> {
    let mut norms: Vec<f64> = problem.w.iter().map(|w| w.norm()).collect();
    norms.sort_by(f64::total_cmp);
    let scale = norms[norms.len() / 2];
    let beta = problem.cone.beta();
    let mut out = Vec::new();
    for rho in [0.25, 0.5, 1.0, 2.0, 4.0] {
        for k in 0..12 {
            let c = Complex64::from_polar(rho * scale, PI * (k as f64 - 5.5) / 6.0);
            for ln_big in [-1.0, 0.0, 1.0] {
                out.push([(ln_big + scale.ln()) / beta, c.re, c.im]);
            }
        }
    }
    out
}

pub fn fit_family(samples: &[(Complex64, f64)], cone: ConeParams) -> Result<FitResult> {
    validate(samples)?;
    let w = samples
        .iter()
        .map(|(z, _)| {
            let (r, theta) = halfplane_polar(*z)?;
            halfplane_power(r, theta, cone.beta())
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
    let problem = Problem { cone, w, values: &values };

    let n = samples.len() as f64;
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut best: Option<Run> = None;
    let mut last_err = None;
    for batch in [starts(&problem), lattice_starts(&problem)] {
        // an acceptable rms can still be a local minimum; only an exact fit ends the search
        if best.as_ref().is_some_and(|b| (b.cost / n).sqrt() <= 1e-10 * scale) {
            break;
        }
        for start in batch {
            match gauss_newton(&problem, start) {
                Ok(run) => {
                    if best.as_ref().is_none_or(|b| run.cost < b.cost) {
                        best = Some(run);
                    }
                }
                Err(e) => last_err = Some(e),
            }
        }
    }
    let run = match (best, last_err) {
        (Some(run), _) => run,
        (None, Some(e)) => return Err(e),
        (None, None) => unreachable!("at least one start is tried"),
    };

    let rms = (run.cost / n).sqrt();
    if rms > NOT_IN_FAMILY * scale {
        return Err(Error::NotInFamily {
            rms,
            threshold: NOT_IN_FAMILY * scale,
        });
    }

    let mut jac = Vec::new();
    let r = problem.evaluate(run.p, Some(&mut jac));
    let (a, _) = normal_equations(&jac, &r);
    let sigma2 = run.cost / (n - 3.0).max(1.0);
    let mut covariance_diag = [f64::INFINITY; 3];
    for (i, slot) in covariance_diag.iter_mut().enumerate() {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        if let Some(col) = solve3(a, e) {
            *slot = sigma2 * col[i];
        }
    }

    let fam = FamilyParams::new(cone, run.p[0].exp(), Complex64::new(run.p[1], run.p[2]))?;
    Ok(FitResult {
        fam,
        lambda: fam.lambda(),
        s0: run.p[1],
        t0: run.p[2],
        curvatures: curvatures_from_z0(&fam),
        rms_residual: rms,
        iterations: run.iterations,
        covariance_diag,
    })
}
