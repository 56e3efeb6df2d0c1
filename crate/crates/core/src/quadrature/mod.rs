//! Energy integrals of a conformal factor over the half-plane and its
//! boundary, the `d`-identity, the Pohozaev identity on half-discs and the
//! far-field slope of `u` against `ln r`.
//!
//! All radial integrals run in `rho = r^beta`, which absorbs the corner
//! weight. The region `r > r_split` is integrated as the region
//! `r < 1 / r_split` of the Kelvin transform.

pub mod gk;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{curvatures_from_z0, BoundaryCurvatures, ConeParams, FamilyParams};
use crate::error::{Error, Result};
use crate::field::{ConformalField, FnField};
use crate::geometry::{kelvin_family, kelvin_transform};

pub use gk::{integrate, Integral, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub r_split: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            r_split: 1.0,
            max_subdivisions: 60,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if !ok(self.r_split) {
            return Err(Error::InvalidParameter(format!("r_split must be positive (got {})", self.r_split)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidParameter("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    fn outer(&self) -> Tolerance {
        Tolerance {
            abs: self.abs_tol,
            rel: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// The angular integrals sit inside the radial ones and get a tenth of
    /// the tolerance.
    fn inner(&self) -> Tolerance {
        Tolerance {
            abs: 0.1 * self.abs_tol,
            rel: 0.1 * self.rel_tol,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// Integral of `|x|^{2 alpha} e^u` over the half-plane.
    pub area_integral: f64,
    /// Integral of `c(x) |x|^alpha e^{u/2}` over the boundary.
    pub boundary_integral_weighted: f64,
    /// Integral of `|x|^alpha e^{u/2}` over the boundary.
    pub boundary_integral_abs: f64,
    /// `(area - weighted boundary) / pi`.
    pub d_value: f64,
    /// Absolute error bound on `d_value` from the quadrature estimates.
    pub error_estimate: f64,
}

impl EnergyReport {
    pub fn expected_d(cone: ConeParams) -> f64 {
        cone.decay_rate()
    }

    /// `d >= 2 + 2 alpha`.
    pub fn satisfies_lower_bound(&self, cone: ConeParams) -> bool {
        self.d_value >= 2.0 * cone.beta()
    }
}

fn to_rho_radius(rho: f64, beta: f64) -> f64 {
    rho.powf(1.0 / beta)
}

/// `(1/beta) int_{rho_a}^{rho_b} rho int_0^pi e^u dtheta drho`.
fn area_band<F: ConformalField + ?Sized>(field: &F, rho_a: f64, rho_b: f64, cfg: &QuadratureConfig) -> Result<Integral> {
    let beta = field.cone().beta();
    let inner_tol = cfg.inner();
    let radial = |rho: f64| -> Result<f64> {
        let r = to_rho_radius(rho, beta);
        let angular = |theta: f64| -> Result<f64> { Ok(field.u(Complex64::from_polar(r, theta))?.exp()) };
        Ok(rho * integrate(&angular, 0.0, PI, inner_tol, false)?.value)
    };
    let mut out = integrate(&radial, rho_a, rho_b, cfg.outer(), true)?;
    out.value /= beta;
    out.error /= beta;
    Ok(out)
}

fn ray_point(r: f64, positive: bool) -> Complex64 {
    if positive {
        Complex64::new(r, 0.0)
    } else {
        Complex64::new(-r, 0.0)
    }
}

/// `(1/beta) int_{rho_a}^{rho_b} e^{u/2} drho` along one boundary ray.
fn ray_band<F: ConformalField + ?Sized>(
    field: &F,
    positive: bool,
    rho_a: f64,
    rho_b: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let beta = field.cone().beta();
    let f = |rho: f64| -> Result<f64> { Ok((0.5 * field.u(ray_point(to_rho_radius(rho, beta), positive))?).exp()) };
    let mut out = integrate(&f, rho_a, rho_b, cfg.outer(), false)?;
    out.value /= beta;
    out.error /= beta;
    Ok(out)
}

fn add(a: Integral, b: Integral) -> Integral {
    Integral {
        value: a.value + b.value,
        error: a.error + b.error,
        subdivisions: a.subdivisions + b.subdivisions,
        evaluations: a.evaluations + b.evaluations,
    }
}

/// Area integral over `r < radius` (`radius = inf` for the half-plane),
/// using the Kelvin image `kelvin` beyond `r_split`.
fn area_within<F, G>(field: &F, kelvin: &G, radius: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: ConformalField + ?Sized,
    G: ConformalField + ?Sized,
{
    let beta = field.cone().beta();
    let split = cfg.r_split;
    if radius <= split {
        return area_band(field, 0.0, radius.powf(beta), cfg);
    }
    let inner = area_band(field, 0.0, split.powf(beta), cfg)?;
    let lo = if radius.is_infinite() { 0.0 } else { radius.powf(-beta) };
    let outer = area_band(kelvin, lo, split.powf(-beta), cfg)?;
    Ok(add(inner, outer))
}

/// Boundary integral along one ray over `0 < r < radius`.
fn ray_within<F, G>(field: &F, kelvin: &G, positive: bool, radius: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: ConformalField + ?Sized,
    G: ConformalField + ?Sized,
{
    let beta = field.cone().beta();
    let split = cfg.r_split;
    if radius <= split {
        return ray_band(field, positive, 0.0, radius.powf(beta), cfg);
    }
    let inner = ray_band(field, positive, 0.0, split.powf(beta), cfg)?;
    let lo = if radius.is_infinite() { 0.0 } else { radius.powf(-beta) };
    let outer = ray_band(kelvin, positive, lo, split.powf(-beta), cfg)?;
    Ok(add(inner, outer))
}

/// `int |x|^{2 alpha} e^u dx` over the half-plane for an arbitrary field.
pub fn energy_area_with<F: ConformalField + ?Sized>(field: &F, cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.validate()?;
    area_within(field, &kelvin_transform(field), f64::INFINITY, cfg)
}

pub fn energy_area(fam: &FamilyParams, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    Ok(area_within(fam, &kelvin_family(fam)?, f64::INFINITY, cfg)?.value)
}

/// Boundary integrals on the positive and negative rays.
fn ray_pair<F, G>(field: &F, kelvin: &G, radius: f64, cfg: &QuadratureConfig) -> Result<(Integral, Integral)>
where
    F: ConformalField + ?Sized,
    G: ConformalField + ?Sized,
{
    Ok((
        ray_within(field, kelvin, true, radius, cfg)?,
        ray_within(field, kelvin, false, radius, cfg)?,
    ))
}

/// `int |x|^alpha e^{u/2} ds`, multiplied by `c(s)` when `weights` is given.
pub fn energy_boundary_with<F: ConformalField + ?Sized>(
    field: &F,
    weights: Option<BoundaryCurvatures>,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    cfg.validate()?;
    let (pos, neg) = ray_pair(field, &kelvin_transform(field), f64::INFINITY, cfg)?;
    Ok(weigh(pos, neg, weights))
}

fn weigh(pos: Integral, neg: Integral, weights: Option<BoundaryCurvatures>) -> Integral {
    let (a, b) = weights.map_or((1.0, 1.0), |bc| (bc.c1, bc.c2));
    Integral {
        value: a * pos.value + b * neg.value,
        error: a.abs() * pos.error + b.abs() * neg.error,
        subdivisions: pos.subdivisions + neg.subdivisions,
        evaluations: pos.evaluations + neg.evaluations,
    }
}

pub fn energy_boundary(fam: &FamilyParams, weighted: bool, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let (pos, neg) = ray_pair(fam, &kelvin_family(fam)?, f64::INFINITY, cfg)?;
    let weights = weighted.then(|| curvatures_from_z0(fam));
    Ok(weigh(pos, neg, weights).value)
}

fn report(area: Integral, pos: Integral, neg: Integral, bc: BoundaryCurvatures) -> EnergyReport {
    let weighted = weigh(pos, neg, Some(bc));
    let abs = weigh(pos, neg, None);
    EnergyReport {
        area_integral: area.value,
        boundary_integral_weighted: weighted.value,
        boundary_integral_abs: abs.value,
        d_value: (area.value - weighted.value) / PI,
        error_estimate: (area.error + weighted.error) / PI,
    }
}

/// Both energies of a family member and the resulting `d`.
pub fn d_identity(fam: &FamilyParams, cfg: &QuadratureConfig) -> Result<EnergyReport> {
    cfg.validate()?;
    let kelvin = kelvin_family(fam)?;
    let area = area_within(fam, &kelvin, f64::INFINITY, cfg)?;
    let (pos, neg) = ray_pair(fam, &kelvin, f64::INFINITY, cfg)?;
    Ok(report(area, pos, neg, curvatures_from_z0(fam)))
}

/// `d` for an arbitrary field with the given Neumann coefficients.
pub fn d_identity_with<F: ConformalField + ?Sized>(
    field: &F,
    bc: BoundaryCurvatures,
    cfg: &QuadratureConfig,
) -> Result<EnergyReport> {
    cfg.validate()?;
    let kelvin = kelvin_transform(field);
    let area = area_within(field, &kelvin, f64::INFINITY, cfg)?;
    let (pos, neg) = ray_pair(field, &kelvin, f64::INFINITY, cfg)?;
    Ok(report(area, pos, neg, bc))
}

/// `u = -beta ln(1 + |x|^2)`, whose weighted density decays like
/// `|x|^{-2}` and therefore has infinite energy.
pub fn borderline_decay_field(cone: ConeParams) -> FnField<impl Fn(Complex64) -> Result<f64> + Sync> {
    let beta = cone.beta();
    FnField::new(cone, move |z: Complex64| Ok(-beta * z.norm_sqr().ln_1p()))
}

/// Angles used for circle averages: `n + 1` equispaced points on `[0, pi]`
/// with trapezoid weights.
fn trapezoid_mean(n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for k in 0..=n {
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * f(PI * k as f64 / n as f64)?;
    }
    Ok(acc / n as f64)
}

const SLOPE_ANGLES: usize = 64;

/// Least-squares slope of the angular mean of `u` against `ln r`.
pub fn asymptotic_slope<F: ConformalField + ?Sized>(field: &F, radii: &[f64]) -> Result<f64> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("at least two radii are needed".into()));
    }
    if radii[0] < 10.0 || radii.windows(2).any(|w| w[1] <= w[0]) || radii.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radii must be finite, increasing and at least 10 (got {radii:?})"
        )));
    }
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        xs.push(r.ln());
        ys.push(trapezoid_mean(SLOPE_ANGLES, |t| field.u(Complex64::from_polar(r, t)))?);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `max_theta r^{1.1} |u_r + d / r|` on the circle of radius `r`.
pub fn radial_gradient_defect<F: ConformalField + ?Sized>(field: &F, r: f64, d: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=SLOPE_ANGLES {
        let theta = PI * k as f64 / SLOPE_ANGLES as f64;
        let z = Complex64::from_polar(r, theta);
        let [us, ut] = field.grad_u(z)?;
        let ur = theta.cos() * us + theta.sin() * ut;
        worst = worst.max(r.powf(1.1) * (ur + d / r).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub radius: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs| / (1 + |lhs| + |rhs|)`.
    pub residual: f64,
    /// `sqrt(-2 rhs / pi)`, which tends to `d` as the radius grows.
    pub d_estimate: Option<f64>,
}

/// Both sides of the Pohozaev identity on the half-disc of radius `radius`
/// for a field with Neumann coefficients `bc`; `kelvin` is its Kelvin
/// image, used for the part of the half-disc beyond `r_split`.
pub fn pohozaev_with<F, G>(
    field: &F,
    kelvin: &G,
    bc: BoundaryCurvatures,
    radius: f64,
    cfg: &QuadratureConfig,
) -> Result<PohozaevReport>
where
    F: ConformalField + ?Sized,
    G: ConformalField + ?Sized,
{
    cfg.validate()?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be finite and > 0 (got {radius})")));
    }
    let beta = field.cone().beta();
    let tol = cfg.outer();
    let kinetic = |theta: f64| -> Result<f64> {
        let [us, ut] = field.grad_u(Complex64::from_polar(radius, theta))?;
        let (sin, cos) = theta.sin_cos();
        let ur = cos * us + sin * ut;
        let ut_over_r = -sin * us + cos * ut;
        Ok(ut_over_r * ut_over_r - ur * ur)
    };
    let lhs = 0.5 * radius * radius * integrate(&kinetic, 0.0, PI, tol, false)?.value;

    let arc = |theta: f64| -> Result<f64> { Ok(field.u(Complex64::from_polar(radius, theta))?.exp()) };
    let arc_term = radius.powf(2.0 * beta) * integrate(&arc, 0.0, PI, tol, false)?.value;
    let area = area_within(field, kelvin, radius, cfg)?.value;
    let (pos, neg) = ray_pair(field, kelvin, radius, cfg)?;
    let boundary = weigh(pos, neg, Some(bc)).value;
    let ends = radius.powf(beta)
        * (bc.c1 * (0.5 * field.u(ray_point(radius, true))?).exp()
            + bc.c2 * (0.5 * field.u(ray_point(radius, false))?).exp());
    let rhs = arc_term - 2.0 * beta * area - 2.0 * ends + 2.0 * beta * boundary;

    let d_estimate = (rhs < 0.0).then(|| (-2.0 * rhs / PI).sqrt());
    Ok(PohozaevReport {
        radius,
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs()),
        d_estimate,
    })
}

pub fn pohozaev_residual(fam: &FamilyParams, radius: f64, cfg: &QuadratureConfig) -> Result<PohozaevReport> {
    pohozaev_with(fam, &kelvin_family(fam)?, curvatures_from_z0(fam), radius, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::z0_from_curvatures;
    use std::f64::consts::SQRT_2;

    fn member(alpha: f64, lambda: f64, s0: f64, t0: f64) -> FamilyParams {
        FamilyParams::new(ConeParams::new(alpha).unwrap(), lambda, Complex64::new(s0, t0)).unwrap()
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn area_examples() {
        let a = energy_area(&member(0.0, 1.0, 0.0, 0.0), &cfg()).unwrap();
        assert!((a - 4.0 * PI).abs() < 1e-7);
        let a = energy_area(&member(1.0, 1.0, 0.0, 0.0), &cfg()).unwrap();
        assert!((a - 8.0 * PI).abs() < 1e-7);
        let a = energy_area(&member(0.0, 2.0, 0.0, 0.0), &cfg()).unwrap();
        assert!((a - 4.0 * PI).abs() < 1e-7);
    }

    #[test]
    fn area_by_radial_antiderivative() {
        // alpha = 0, lambda = 1: pi * int 8 r / (1 + r^2)^2 dr over (0, R) = 4 pi R^2 / (1 + R^2)
        let fam = member(0.0, 1.0, 0.0, 0.0);
        for radius in [0.5, 3.0] {
            let got = area_within(&fam, &kelvin_family(&fam).unwrap(), radius, &cfg()).unwrap().value;
            let want = 4.0 * PI * radius * radius / (1.0 + radius * radius);
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn boundary_examples() {
        let b = energy_boundary(&member(0.0, 1.0, 0.0, 0.0), false, &cfg()).unwrap();
        assert!((b - 2.0 * SQRT_2 * PI).abs() < 1e-7);
        let b = energy_boundary(&member(0.0, 1.0, 0.0, 0.0), true, &cfg()).unwrap();
        assert!(b.abs() < 1e-15);
        let b = energy_boundary(&member(1.0, 1.0, 0.0, 0.0), false, &cfg()).unwrap();
        assert!((b - 2.0 * SQRT_2 * PI).abs() < 1e-7);
    }

    #[test]
    fn d_examples() {
        let r = d_identity(&member(0.0, 1.0, 0.0, 0.0), &cfg()).unwrap();
        assert!((r.d_value - 4.0).abs() < 1e-7);

        let r = d_identity(&member(0.0, 1.0, 0.0, 1.0 / SQRT_2), &cfg()).unwrap();
        assert!(r.boundary_integral_weighted.abs() > 1.0);
        assert!((r.d_value - 4.0).abs() < 1e-7);

        let cone = ConeParams::new(0.5).unwrap();
        let fam = z0_from_curvatures(cone, BoundaryCurvatures::new(0.4, -0.2).unwrap(), 1.3, None).unwrap();
        let r = d_identity(&fam, &cfg()).unwrap();
        assert!((r.d_value - 6.0).abs() < 1e-6);
        assert!(r.satisfies_lower_bound(cone));
        assert!(r.area_integral > 0.0);
    }

    #[test]
    fn generic_route_matches_family_route() {
        let fam = member(0.5, 1.3, 0.3, 0.2);
        let a = d_identity(&fam, &cfg()).unwrap();
        let b = d_identity_with(&fam, curvatures_from_z0(&fam), &cfg()).unwrap();
        assert!((a.d_value - b.d_value).abs() < 1e-8);
    }

    #[test]
    fn halving_tolerances_moves_less_than_the_error_estimate() {
        let fam = member(2.3, 0.6, 0.2, 0.4);
        let coarse = d_identity(&fam, &cfg()).unwrap();
        let fine_cfg = QuadratureConfig {
            rel_tol: 0.5 * cfg().rel_tol,
            abs_tol: 0.5 * cfg().abs_tol,
            ..cfg()
        };
        let fine = d_identity(&fam, &fine_cfg).unwrap();
        assert!((coarse.d_value - fine.d_value).abs() <= coarse.error_estimate);
    }

    #[test]
    fn split_radius_does_not_matter() {
        let fam = member(0.7, 1.4, -0.4, 0.9);
        let a = d_identity(&fam, &cfg()).unwrap().d_value;
        let b = d_identity(&fam, &QuadratureConfig { r_split: 3.0, ..cfg() }).unwrap().d_value;
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn borderline_decay_never_yields_a_value() {
        for alpha in [0.0, 0.5, 1.0] {
            let field = borderline_decay_field(ConeParams::new(alpha).unwrap());
            assert!(matches!(
                energy_area_with(&field, &cfg()),
                Err(Error::NonConvergence { monotone_growth: true, .. })
            ));
            assert!(matches!(
                energy_boundary_with(&field, None, &cfg()),
                Err(Error::NonConvergence { .. })
            ));
        }
    }

    #[test]
    fn slope_examples() {
        let radii = [1e3, 1e4, 1e5];
        let s = asymptotic_slope(&member(0.0, 1.0, 0.0, 0.0), &radii).unwrap();
        assert!((s + 4.0).abs() < 0.01);
        let s = asymptotic_slope(&member(0.5, 1.0, 0.3, 0.4), &radii).unwrap();
        assert!((s + 6.0).abs() < 0.01);
        let cone = ConeParams::new(2.0).unwrap();
        let fam = z0_from_curvatures(cone, BoundaryCurvatures::new(0.3, 0.3).unwrap(), 1.0, None).unwrap();
        let s = asymptotic_slope(&fam, &radii).unwrap();
        assert!((s + 12.0).abs() < 0.01);
        assert!(asymptotic_slope(&fam, &[5.0, 100.0]).is_err());
    }

    #[test]
    fn slope_by_two_point_quotient() {
        let fam = member(0.0, 1.0, 0.0, 0.0);
        let (a, b) = (1e3f64, 1e5f64);
        let q = (fam.u(Complex64::new(0.0, b)).unwrap() - fam.u(Complex64::new(0.0, a)).unwrap()) / (b / a).ln();
        let s = asymptotic_slope(&fam, &[a, b]).unwrap();
        assert!((q - s).abs() < 1e-6);
    }

    #[test]
    fn gradient_defect_stays_bounded() {
        let fam = member(0.5, 1.2, 0.4, 0.6);
        let d = fam.cone().decay_rate();
        let values: Vec<f64> = [1e2, 1e3, 1e4, 1e5]
            .iter()
            .map(|&r| radial_gradient_defect(&fam, r, d).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0] * 1.5));
    }

    #[test]
    fn pohozaev_examples() {
        let fam = member(0.0, 1.0, 0.0, 0.0);
        for radius in [5.0, 0.01] {
            assert!(pohozaev_residual(&fam, radius, &cfg()).unwrap().residual <= 1e-6);
        }
        let fam = member(0.5, 0.8, 0.7, 0.5);
        for radius in [0.5, 2.0, 20.0] {
            assert!(pohozaev_residual(&fam, radius, &cfg()).unwrap().residual <= 1e-6);
        }
    }

    #[test]
    fn pohozaev_d_estimate_approaches_decay_rate() {
        let fam = member(0.0, 1.0, 0.0, 0.0);
        let errs: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r| (pohozaev_residual(&fam, r, &cfg()).unwrap().d_estimate.unwrap() - 4.0).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < 0.01);
    }
}
