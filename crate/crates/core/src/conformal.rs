//! Parameter types and the closed-form solution family.
//!
//! Every member of the family is described by a cone order `alpha > -1`, a
//! scale `lambda > 0` and a center `z0 = s0 + i t0`. With `beta = alpha + 1`,
//! `Lambda = lambda^beta` and `w = z^beta` (taken on the closed upper
//! half-plane with `arg z` in `[0, pi]`), the conformal factor is
//!
//! ```text
//! e^u = 8 beta^2 Lambda^2 / (Lambda^2 + |w - z0|^2)^2
//! ```
//!
//! so that `|z|^{2 alpha} e^u |dz|^2` has curvature one in the interior and
//! satisfies `du/dt = c(s) |s|^alpha e^{u/2}` on the two boundary rays.
//!
//! All derivatives are computed in closed form through Wirtinger calculus:
//! for a real function `f`, `grad f = (2 Re f_z, -2 Im f_z)` and
//! `lap f = 4 f_{z zbar}`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `|alpha - round(alpha)|` below this is treated as an integer order.
pub const INTEGER_TOL: f64 = 1e-12;
/// Orders this close to an integer (but not within [`INTEGER_TOL`]) are
/// flagged: the center formula divides by `sin(pi alpha)`.
pub const NEAR_INTEGER_WARN: f64 = 1e-6;
/// Slack allowed on `theta` outside `[0, pi]` before reporting a domain error.
pub const ANGLE_TOL: f64 = 1e-12;
/// Tolerance of the integer-order parity rule on `(c1, c2)`.
pub const PARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    alpha: f64,
    beta: f64,
}

impl ConeParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::InvalidParameter(format!(
                "cone order alpha must be finite and > -1 (got {alpha})"
            )));
        }
        Ok(ConeParams {
            alpha,
            beta: alpha + 1.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `alpha + 1`, the exponent of the developing map `z -> z^beta`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_integer(&self) -> bool {
        (self.alpha - self.alpha.round()).abs() < INTEGER_TOL
    }

    /// Integer orders are always non-negative since `alpha > -1`.
    pub fn integer_order(&self) -> Option<u64> {
        self.is_integer().then(|| self.alpha.round() as u64)
    }

    pub fn is_near_integer(&self) -> bool {
        let gap = (self.alpha - self.alpha.round()).abs();
        !self.is_integer() && gap < NEAR_INTEGER_WARN
    }

    /// Decay rate `d = 4 + 4 alpha` of finite-energy solutions.
    pub fn decay_rate(&self) -> f64 {
        4.0 * self.beta
    }

    /// Weight `rho = -alpha (alpha + 2) / 2` of the projective connection at the corner.
    pub fn connection_weight(&self) -> f64 {
        -self.alpha * (self.alpha + 2.0) / 2.0
    }
}

/// Neumann coefficients on the two boundary rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurvatures {
    /// Coefficient on `{t = 0, s > 0}`.
    pub c1: f64,
    /// Coefficient on `{t = 0, s < 0}`.
    pub c2: f64,
}

impl BoundaryCurvatures {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "boundary curvatures must be finite (got c1 = {c1}, c2 = {c2})"
            )));
        }
        Ok(BoundaryCurvatures { c1, c2 })
    }

    pub fn zero() -> Self {
        BoundaryCurvatures { c1: 0.0, c2: 0.0 }
    }

    /// Piecewise coefficient `c(s)`; undefined at the corner.
    pub fn at(&self, s: f64) -> Result<f64> {
        if s > 0.0 {
            Ok(self.c1)
        } else if s < 0.0 {
            Ok(self.c2)
        } else {
            Err(domain("boundary coefficient is undefined at the corner s = 0"))
        }
    }

    /// Geodesic curvature of each ray under the Gauss-curvature-1/2
    /// normalization of `e^{u}|dz|^2`: `kappa_i = -c_i / 2`.
    pub fn geodesic_curvatures(&self) -> (f64, f64) {
        (-self.c1 / 2.0, -self.c2 / 2.0)
    }
}

/// Which conformal factor a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// `u`, metric `|z|^{2 alpha} e^u |dz|^2`.
    Punctured,
    /// `u + 2 alpha ln|z|`, metric `e^{u~} |dz|^2`.
    Full,
}

/// A member of the classified family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    cone: ConeParams,
    lambda: f64,
    z0: Complex64,
    big_lambda: f64,
}

impl FamilyParams {
    pub fn new(cone: ConeParams, lambda: f64, z0: Complex64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale lambda must be finite and > 0 (got {lambda})"
            )));
        }
        if !(z0.re.is_finite() && z0.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("center must be finite (got {z0})")));
        }
        let big_lambda = lambda.powf(cone.beta());
        if !(big_lambda.is_finite() && big_lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda^beta = {lambda}^{} is not representable",
                cone.beta()
            )));
        }
        Ok(FamilyParams {
            cone,
            lambda,
            z0,
            big_lambda,
        })
    }

    /// Build a member from `Lambda = lambda^beta` directly.
    pub fn from_big_lambda(cone: ConeParams, big_lambda: f64, z0: Complex64) -> Result<Self> {
        if !(big_lambda.is_finite() && big_lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Lambda must be finite and > 0 (got {big_lambda})"
            )));
        }
        Self::new(cone, big_lambda.powf(1.0 / cone.beta()), z0)
    }

    pub fn cone(&self) -> ConeParams {
        self.cone
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn big_lambda(&self) -> f64 {
        self.big_lambda
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn centered_at_origin(&self) -> bool {
        self.z0 == Complex64::new(0.0, 0.0)
    }

    fn ln_prefactor(&self) -> f64 {
        // ln(8 beta^2 Lambda^2)
        8f64.ln() + 2.0 * self.cone.beta().ln() + 2.0 * self.cone.beta() * self.lambda.ln()
    }

    /// `u(0)` in the punctured gauge, i.e. the continuous value at the corner.
    pub fn corner_value(&self) -> f64 {
        let l2 = self.big_lambda * self.big_lambda;
        self.ln_prefactor() - 2.0 * (l2 + self.z0.norm_sqr()).ln()
    }

    fn local(&self, z: Complex64) -> Result<Local> {
        let (r, theta) = halfplane_polar(z)?;
        let beta = self.cone.beta();
        let w = halfplane_power(r, theta, beta)?;
        let diff = w - self.z0;
        let q = self.big_lambda * self.big_lambda + diff.norm_sqr();
        Ok(Local { r, theta, diff, q })
    }

    /// `dw/dz = beta z^alpha`; defined at the corner only for `alpha >= 0`.
    fn dw(&self, loc: &Local) -> Result<Complex64> {
        let beta = self.cone.beta();
        Ok(halfplane_power(loc.r, loc.theta, self.cone.alpha())? * beta)
    }

    fn d2w(&self, loc: &Local) -> Result<Complex64> {
        let alpha = self.cone.alpha();
        if alpha == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(halfplane_power(loc.r, loc.theta, alpha - 1.0)? * (self.cone.beta() * alpha))
    }

    /// Values exist at the corner except in the full gauge; derivatives
    /// additionally need `alpha >= 0`.
    fn check_corner(&self, z: Complex64, gauge: Gauge, what: &str, derivative: bool) -> Result<()> {
        let alpha = self.cone.alpha();
        if z.norm() == 0.0 && (gauge == Gauge::Full && alpha != 0.0 || derivative && alpha < 0.0) {
            return Err(domain(format!("{what} is singular at the corner z = 0")));
        }
        Ok(())
    }
}

struct Local {
    r: f64,
    theta: f64,
    diff: Complex64,
    q: f64,
}

/// Polar coordinates `(r, theta)` of a point of the closed upper half-plane,
/// with the negative real axis at `theta = pi`.
pub fn halfplane_polar(z: Complex64) -> Result<(f64, f64)> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain(format!("point {z} is not finite")));
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok((0.0, 0.0));
    }
    if z.im < -ANGLE_TOL * r.max(1.0) {
        return Err(domain(format!("point {z} lies below the real axis")));
    }
    let theta = if z.im <= 0.0 {
        if z.re > 0.0 {
            0.0
        } else {
            PI
        }
    } else {
        z.im.atan2(z.re)
    };
    Ok((r, theta))
}

/// `z^p` on the closed upper half-plane in polar form,
/// `r^p (cos(p theta), sin(p theta))` with `theta` in `[0, pi]`.
pub fn halfplane_power(r: f64, theta: f64, p: f64) -> Result<Complex64> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(domain(format!("radius must be finite and >= 0 (got {r})")));
    }
    if !(-ANGLE_TOL..=PI + ANGLE_TOL).contains(&theta) {
        return Err(domain(format!("angle {theta} outside [0, pi]")));
    }
    let theta = theta.clamp(0.0, PI);
    if r == 0.0 {
        return match p.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Ok(Complex64::new(0.0, 0.0)),
            Some(std::cmp::Ordering::Equal) => Ok(Complex64::new(1.0, 0.0)),
            _ => Err(domain(format!("0^{p} is singular"))),
        };
    }
    Ok(Complex64::from_polar(r.powf(p), p * theta))
}

/// Conformal factor of a family member.
pub fn eval_u(z: Complex64, fam: &FamilyParams, gauge: Gauge) -> Result<f64> {
    fam.check_corner(z, gauge, "the full-gauge factor", false)?;
    let loc = fam.local(z)?;
    let u = fam.ln_prefactor() - 2.0 * loc.q.ln();
    Ok(match gauge {
        Gauge::Punctured => u,
        Gauge::Full if fam.cone.alpha() == 0.0 => u,
        Gauge::Full => u + 2.0 * fam.cone.alpha() * loc.r.ln(),
    })
}

/// Wirtinger derivatives `(u_z, u_zz)` of the punctured-gauge factor.
pub fn eval_wirtinger_u(z: Complex64, fam: &FamilyParams) -> Result<(Complex64, Complex64)> {
    fam.check_corner(z, Gauge::Punctured, "the first derivative", true)?;
    let loc = fam.local(z)?;
    let dw = fam.dw(&loc)?;
    let d2w = fam.d2w(&loc)?;
    let conj_diff = loc.diff.conj();
    let a = dw * conj_diff;
    let u_z = -2.0 * a / loc.q;
    let u_zz = -2.0 * d2w * conj_diff / loc.q + 2.0 * a * a / (loc.q * loc.q);
    Ok((u_z, u_zz))
}

/// Cartesian gradient `(u_s, u_t)`.
pub fn eval_grad_u(z: Complex64, fam: &FamilyParams, gauge: Gauge) -> Result<[f64; 2]> {
    fam.check_corner(z, gauge, "the gradient", true)?;
    let (u_z, _) = first_wirtinger(z, fam)?;
    let mut g = [2.0 * u_z.re, -2.0 * u_z.im];
    if gauge == Gauge::Full && fam.cone.alpha() != 0.0 {
        let r2 = z.norm_sqr();
        g[0] += 2.0 * fam.cone.alpha() * z.re / r2;
        g[1] += 2.0 * fam.cone.alpha() * z.im / r2;
    }
    Ok(g)
}

fn first_wirtinger(z: Complex64, fam: &FamilyParams) -> Result<(Complex64, Local)> {
    let loc = fam.local(z)?;
    let dw = fam.dw(&loc)?;
    Ok((-2.0 * dw * loc.diff.conj() / loc.q, loc))
}

/// Laplacian of the conformal factor. `ln|z|` is harmonic away from the
/// corner, so both gauges share the same value there.
pub fn eval_laplacian_u(z: Complex64, fam: &FamilyParams, gauge: Gauge) -> Result<f64> {
    fam.check_corner(z, gauge, "the Laplacian", true)?;
    let loc = fam.local(z)?;
    let dw2 = fam.dw(&loc)?.norm_sqr();
    // 4 d/dzbar [-2 w' conj(w - z0) / Q], kept unsimplified.
    Ok(-8.0 * dw2 / loc.q + 8.0 * dw2 * loc.diff.norm_sqr() / (loc.q * loc.q))
}

/// `(h, h_z, h_zz)` for `h = e^{-u~/2} = |z|^{-alpha} Q / (sqrt(8) beta Lambda)`,
/// differentiated as a product rather than through `u~`.
pub fn eval_h_derivatives(z: Complex64, fam: &FamilyParams) -> Result<(f64, Complex64, Complex64)> {
    if z.norm() == 0.0 {
        return Err(domain("h is singular at the corner z = 0"));
    }
    let loc = fam.local(z)?;
    let alpha = fam.cone.alpha();
    let dw = fam.dw(&loc)?;
    let d2w = fam.d2w(&loc)?;
    let conj_diff = loc.diff.conj();
    let q_z = dw * conj_diff;
    let q_zz = d2w * conj_diff;
    let p = loc.r.powf(-alpha);
    let p_z = -0.5 * alpha * p / z;
    let p_zz = 0.5 * alpha * (0.5 * alpha + 1.0) * p / (z * z);
    let k = 8f64.sqrt() * fam.cone.beta() * fam.big_lambda;
    let h = loc.q * p / k;
    let h_z = (q_z * p + loc.q * p_z) / k;
    let h_zz = (q_zz * p + 2.0 * q_z * p_z + loc.q * p_zz) / k;
    Ok((h, h_z, h_zz))
}

/// Place the center so that the member satisfies the boundary condition
/// with coefficients `bc`.
///
/// Non-integer orders determine the center uniquely. Integer orders only
/// determine `t0`; `s0` is then a free translation that defaults to 0.
pub fn z0_from_curvatures(
    cone: ConeParams,
    bc: BoundaryCurvatures,
    lambda: f64,
    s0_free: Option<f64>,
) -> Result<FamilyParams> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale lambda must be finite and > 0 (got {lambda})"
        )));
    }
    let big_lambda = lambda.powf(cone.beta());
    let t0 = bc.c1 * big_lambda / SQRT_2;
    let s0 = match cone.integer_order() {
        Some(k) => {
            check_parity(k, cone.alpha(), bc)?;
            s0_free.unwrap_or(0.0)
        }
        None => {
            let (sin, cos) = (PI * cone.alpha()).sin_cos();
            big_lambda * (bc.c1 * cos - bc.c2) / (SQRT_2 * sin)
        }
    };
    FamilyParams::new(cone, lambda, Complex64::new(s0, t0))
}

fn check_parity(order: u64, alpha: f64, bc: BoundaryCurvatures) -> Result<()> {
    let even = order.is_multiple_of(2);
    let target = if even { bc.c2 } else { -bc.c2 };
    let scale = 1f64.max(bc.c1.abs()).max(bc.c2.abs());
    if (bc.c1 - target).abs() > PARITY_TOL * scale {
        return Err(Error::IncompatibleCurvatures {
            alpha,
            c1: bc.c1,
            c2: bc.c2,
            required: if even { "c1 = c2 (even order)" } else { "c1 = -c2 (odd order)" },
        });
    }
    Ok(())
}

/// Boundary coefficients realized by a family member.
pub fn curvatures_from_z0(fam: &FamilyParams) -> BoundaryCurvatures {
    let cone = fam.cone();
    let big_lambda = fam.big_lambda();
    let c1 = SQRT_2 * fam.z0().im / big_lambda;
    let c2 = match cone.integer_order() {
        Some(k) if k.is_multiple_of(2) => c1,
        Some(_) => -c1,
        None => {
            let (sin, cos) = (PI * cone.alpha()).sin_cos();
            c1 * cos - SQRT_2 * fam.z0().re * sin / big_lambda
        }
    };
    BoundaryCurvatures { c1, c2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(alpha: f64, lambda: f64, s0: f64, t0: f64) -> FamilyParams {
        FamilyParams::new(ConeParams::new(alpha).unwrap(), lambda, Complex64::new(s0, t0)).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cone_rejects_order_at_or_below_minus_one() {
        assert!(ConeParams::new(-1.0).is_err());
        assert!(ConeParams::new(-1.5).is_err());
        assert!(ConeParams::new(f64::NAN).is_err());
        let c = ConeParams::new(-0.999).unwrap();
        assert_eq!(c.beta(), c.alpha() + 1.0);
    }

    #[test]
    fn integer_detection_and_warning_band() {
        assert!(ConeParams::new(2.0).unwrap().is_integer());
        assert!(ConeParams::new(2.0 + 1e-13).unwrap().is_integer());
        let near = ConeParams::new(2.0 + 1e-9).unwrap();
        assert!(!near.is_integer() && near.is_near_integer());
        assert!(!ConeParams::new(2.3).unwrap().is_near_integer());
    }

    #[test]
    fn power_examples() {
        let p = halfplane_power(1.0, 0.0, 2.7).unwrap();
        assert!(close(p.re, 1.0, 1e-15) && close(p.im, 0.0, 1e-15));
        let p = halfplane_power(1.0, PI / 2.0, 2.0).unwrap();
        assert!(close(p.re, -1.0, 1e-15) && close(p.im, 0.0, 1e-15));
        let p = halfplane_power(2.0, PI, 1.5).unwrap();
        assert!(close(p.re, 0.0, 1e-14) && close(p.im, -2.8284271247461903, 1e-14));
    }

    #[test]
    fn power_rejects_angles_outside_halfplane() {
        assert!(halfplane_power(1.0, -1e-6, 1.5).is_err());
        assert!(halfplane_power(1.0, PI + 1e-6, 1.5).is_err());
        assert!(halfplane_power(1.0, -1e-13, 1.5).is_ok());
        assert!(halfplane_power(0.0, 0.3, -0.5).is_err());
    }

    #[test]
    fn power_agrees_with_integer_complex_power() {
        let z = Complex64::new(-0.7, 1.3);
        let (r, th) = halfplane_polar(z).unwrap();
        let p = halfplane_power(r, th, 3.0).unwrap();
        assert!((p - z * z * z).norm() < 1e-13);
    }

    #[test]
    fn negative_axis_uses_angle_pi() {
        let (_, th) = halfplane_polar(Complex64::new(-2.0, -0.0)).unwrap();
        assert_eq!(th, PI);
        assert!(halfplane_polar(Complex64::new(1.0, -1e-3)).is_err());
    }

    #[test]
    fn eval_u_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!(close(eval_u(Complex64::new(0.0, 0.0), &f, Gauge::Punctured).unwrap(), 8f64.ln(), 1e-14));
        assert!(close(eval_u(Complex64::i(), &f, Gauge::Punctured).unwrap(), 2f64.ln(), 1e-14));
        let f = member(1.0, 1.0, 0.0, 0.0);
        assert!(close(eval_u(Complex64::i(), &f, Gauge::Punctured).unwrap(), 8f64.ln(), 1e-14));
    }

    #[test]
    fn full_gauge_at_corner_is_a_domain_error() {
        let f = member(-0.5, 1.0, 0.0, 0.0);
        assert!(matches!(eval_u(Complex64::new(0.0, 0.0), &f, Gauge::Full), Err(Error::Domain(_))));
        let f = member(0.7, 1.0, 0.0, 0.0);
        assert!(eval_u(Complex64::new(0.0, 0.0), &f, Gauge::Full).is_err());
        assert!(eval_u(Complex64::new(0.0, 0.0), &f, Gauge::Punctured).is_ok());
    }

    #[test]
    fn gauges_differ_by_log_weight() {
        let f = member(1.7, 0.8, 0.3, 0.5);
        let z = Complex64::new(0.4, 0.9);
        let full = eval_u(z, &f, Gauge::Full).unwrap();
        let punct = eval_u(z, &f, Gauge::Punctured).unwrap();
        let expected = 2.0 * 1.7 * z.norm().ln();
        assert!(((full - punct) - expected).abs() <= 1e-13 * expected.abs().max(1.0));
    }

    #[test]
    fn gradient_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        let g = eval_grad_u(Complex64::new(0.0, 0.0), &f, Gauge::Punctured).unwrap();
        assert_eq!(g, [0.0, 0.0]);
        let g = eval_grad_u(Complex64::i(), &f, Gauge::Punctured).unwrap();
        assert!(close(g[0], 0.0, 1e-15) && close(g[1], -2.0, 1e-15));
        let f = member(1.0, 1.0, 0.0, 0.0);
        let g = eval_grad_u(Complex64::new(1.0, 0.0), &f, Gauge::Punctured).unwrap();
        assert!(close(g[0], -4.0, 1e-14) && close(g[1], 0.0, 1e-14));
    }

    #[test]
    fn gradient_at_corner_errors_for_negative_order() {
        let f = member(-0.4, 1.0, 0.0, 0.0);
        assert!(eval_grad_u(Complex64::new(0.0, 0.0), &f, Gauge::Punctured).is_err());
        assert!(eval_laplacian_u(Complex64::new(0.0, 0.0), &f, Gauge::Punctured).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!(close(eval_laplacian_u(Complex64::i(), &f, Gauge::Punctured).unwrap(), -2.0, 1e-14));
        assert!(close(eval_laplacian_u(Complex64::new(0.0, 1e-9), &f, Gauge::Punctured).unwrap(), -8.0, 1e-12));
        let f = member(1.0, 1.0, 0.0, 0.0);
        assert!(close(eval_laplacian_u(Complex64::i(), &f, Gauge::Punctured).unwrap(), -8.0, 1e-14));
    }

    #[test]
    fn center_from_curvatures_examples() {
        let half = ConeParams::new(0.5).unwrap();
        let f = z0_from_curvatures(half, BoundaryCurvatures::new(0.0, -SQRT_2).unwrap(), 1.0, None).unwrap();
        assert!(close(f.z0().re, 1.0, 1e-15) && close(f.z0().im, 0.0, 1e-15));

        for alpha in [-0.5, 0.3, 1.7, 2.3] {
            let c = ConeParams::new(alpha).unwrap();
            let f = z0_from_curvatures(c, BoundaryCurvatures::zero(), 1.0, Some(5.0)).unwrap();
            assert_eq!(f.z0(), Complex64::new(0.0, 0.0));
        }

        let two = ConeParams::new(2.0).unwrap();
        let err = z0_from_curvatures(two, BoundaryCurvatures::new(1.0, 0.5).unwrap(), 1.0, None).unwrap_err();
        assert!(matches!(err, Error::IncompatibleCurvatures { .. }));
        assert!(err.to_string().contains("c1 = c2"));
    }

    #[test]
    fn integer_order_uses_free_translation() {
        let one = ConeParams::new(1.0).unwrap();
        let bc = BoundaryCurvatures::new(1.0, -1.0).unwrap();
        let f = z0_from_curvatures(one, bc, 2.0, Some(0.7)).unwrap();
        assert_eq!(f.z0().re, 0.7);
        assert!(close(f.z0().im, 4.0 / SQRT_2, 1e-14));
        let f = z0_from_curvatures(one, bc, 2.0, None).unwrap();
        assert_eq!(f.z0().re, 0.0);
    }

    #[test]
    fn curvatures_from_center_examples() {
        let bc = curvatures_from_z0(&member(0.5, 1.0, 1.0, 0.0));
        assert!(close(bc.c1, 0.0, 1e-15) && close(bc.c2, -SQRT_2, 1e-15));
        for alpha in [0.0, 1.0, 0.4, 2.3] {
            let bc = curvatures_from_z0(&member(alpha, 1.3, 0.0, 0.0));
            assert_eq!((bc.c1, bc.c2), (0.0, 0.0));
        }
        let bc = curvatures_from_z0(&member(1.0, 1.0, 0.0, 1.0 / SQRT_2));
        assert!(close(bc.c1, 1.0, 1e-15) && close(bc.c2, -1.0, 1e-15));
    }

    #[test]
    fn boundary_coefficient_is_undefined_at_corner() {
        let bc = BoundaryCurvatures::new(0.3, -0.2).unwrap();
        assert_eq!(bc.at(2.0).unwrap(), 0.3);
        assert_eq!(bc.at(-2.0).unwrap(), -0.2);
        assert!(bc.at(0.0).is_err());
        assert_eq!(bc.geodesic_curvatures(), (-0.15, 0.1));
    }
}
