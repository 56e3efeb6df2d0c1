//! Differential-geometric checks on conformal factors: the curvature
//! equation, the Neumann condition, Kelvin transforms, the inversion
//! symmetry, the projective connection and the `h`-system.

use num_complex::Complex64;

use crate::conformal::{
    curvatures_from_z0, eval_h_derivatives, BoundaryCurvatures, ConeParams, FamilyParams, Gauge,
};
use crate::error::{domain, Error, Result};
use crate::field::{fd_jet, ConformalField, PolarGrid, ScalarField};
use crate::numdiff::{fourth_order_step, jet4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMode {
    /// Use the field's own derivatives (exact for family members).
    Analytic,
    /// Fourth-order finite differences of the field values.
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub point: Complex64,
    pub value: f64,
    pub mode: ResidualMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveConnectionValue {
    pub point: Complex64,
    /// Coefficient of `dz^2` in `u~_zz - (u~_z)^2 / 2`.
    pub eta: Complex64,
    /// `rho / z^2`.
    pub expected: Complex64,
    pub weight_rho: f64,
}

impl ProjectiveConnectionValue {
    pub fn deviation(&self) -> f64 {
        (self.eta - self.expected).norm()
    }
}

fn require_interior(z: Complex64) -> Result<()> {
    if !(z.im > 0.0 && z.re.is_finite() && z.im.is_finite()) {
        return Err(domain(format!("{z} is not in the open upper half-plane")));
    }
    Ok(())
}

fn require_off_corner(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        return Err(domain("the corner z = 0 is excluded"));
    }
    if z.im < 0.0 {
        return Err(domain(format!("{z} lies below the real axis")));
    }
    Ok(())
}

fn laplacian<F: ConformalField + ?Sized>(field: &F, z: Complex64, mode: ResidualMode) -> Result<f64> {
    match mode {
        ResidualMode::Analytic => field.laplacian_u(z),
        ResidualMode::FiniteDifference => Ok(fd_jet(field, z)?.laplacian()),
    }
}

fn gradient<F: ConformalField + ?Sized>(field: &F, z: Complex64, mode: ResidualMode) -> Result<[f64; 2]> {
    match mode {
        ResidualMode::Analytic => field.grad_u(z),
        ResidualMode::FiniteDifference => Ok(fd_jet(field, z)?.gradient()),
    }
}

/// `(u~_z, u~_zz)` with `u~ = u + alpha ln(z zbar)`.
pub fn full_gauge_wirtinger<F: ConformalField + ?Sized>(
    field: &F,
    z: Complex64,
    mode: ResidualMode,
) -> Result<(Complex64, Complex64)> {
    require_off_corner(z)?;
    let (u_z, u_zz) = match mode {
        ResidualMode::Analytic => field.wirtinger_u(z)?,
        ResidualMode::FiniteDifference => fd_jet(field, z)?.wirtinger(),
    };
    let alpha = field.cone().alpha();
    Ok((u_z + alpha / z, u_zz - alpha / (z * z)))
}

/// Weight `|z|^{2 alpha}` on the curvature term.
fn corner_weight(cone: ConeParams, r: f64) -> f64 {
    if cone.alpha() == 0.0 {
        1.0
    } else {
        r.powf(2.0 * cone.alpha())
    }
}

/// `lap u + |z|^{2 alpha} e^u`, zero for solutions.
pub fn interior_residual<F: ConformalField + ?Sized>(z: Complex64, field: &F, mode: ResidualMode) -> Result<f64> {
    require_interior(z)?;
    let lap = laplacian(field, z, mode)?;
    let source = corner_weight(field.cone(), z.norm()) * field.u(z)?.exp();
    Ok(lap + source)
}

pub fn interior_sample<F: ConformalField + ?Sized>(z: Complex64, field: &F, mode: ResidualMode) -> Result<ResidualSample> {
    Ok(ResidualSample {
        point: z,
        value: interior_residual(z, field, mode)?,
        mode,
    })
}

/// `u_t - c(s) |s|^alpha e^{u/2}` at `(s, 0)`.
pub fn boundary_residual_with<F: ConformalField + ?Sized>(
    s: f64,
    field: &F,
    bc: BoundaryCurvatures,
    mode: ResidualMode,
) -> Result<f64> {
    let c = bc.at(s)?;
    let z = Complex64::new(s, 0.0);
    let u_t = gradient(field, z, mode)?[1];
    let alpha = field.cone().alpha();
    let weight = if alpha == 0.0 { 1.0 } else { s.abs().powf(alpha) };
    Ok(u_t - c * weight * (0.5 * field.u(z)?).exp())
}

/// Neumann residual of a family member against its own curvatures.
pub fn boundary_residual(s: f64, fam: &FamilyParams) -> Result<f64> {
    boundary_residual_with(s, fam, curvatures_from_z0(fam), ResidualMode::Analytic)
}

/// Scalar curvature `-e^{-u~} lap u~` of `e^{u~}|dz|^2`; one for solutions.
pub fn scalar_curvature<F: ConformalField + ?Sized>(z: Complex64, field: &F, mode: ResidualMode) -> Result<f64> {
    require_interior(z)?;
    let lap = laplacian(field, z, mode)?;
    let weight = corner_weight(field.cone(), z.norm());
    Ok(-lap / (weight * field.u(z)?.exp()))
}

/// `v(x) = u(x / |x|^2) - 4 beta ln|x|`.
pub struct Kelvin<'a, F: ?Sized> {
    inner: &'a F,
}

pub fn kelvin_transform<F: ConformalField + ?Sized>(field: &F) -> Kelvin<'_, F> {
    Kelvin { inner: field }
}

/// `x / |x|^2 = 1 / conj(x)`.
fn invert(z: Complex64) -> Complex64 {
    z / z.norm_sqr()
}

impl<F: ConformalField + ?Sized> ConformalField for Kelvin<'_, F> {
    fn cone(&self) -> ConeParams {
        self.inner.cone()
    }

    fn u(&self, z: Complex64) -> Result<f64> {
        if z.norm() == 0.0 {
            return Err(domain("the Kelvin transform is only defined off the corner; use its limit"));
        }
        let beta = self.inner.cone().beta();
        Ok(self.inner.u(invert(z))? - 4.0 * beta * z.norm().ln())
    }

    fn has_exact_derivatives(&self) -> bool {
        self.inner.has_exact_derivatives()
    }

    fn grad_u(&self, z: Complex64) -> Result<[f64; 2]> {
        if !self.has_exact_derivatives() {
            return Ok(fd_jet(self, z)?.gradient());
        }
        let (v_z, _) = self.wirtinger_u(z)?;
        Ok([2.0 * v_z.re, -2.0 * v_z.im])
    }

    fn laplacian_u(&self, z: Complex64) -> Result<f64> {
        if !self.has_exact_derivatives() {
            return Ok(fd_jet(self, z)?.laplacian());
        }
        require_off_corner(z)?;
        Ok(self.inner.laplacian_u(invert(z))? / z.norm_sqr().powi(2))
    }

    fn wirtinger_u(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        if !self.has_exact_derivatives() {
            return Ok(fd_jet(self, z)?.wirtinger());
        }
        require_off_corner(z)?;
        // zeta = 1/conj(z) depends on conj(z) only, and conj(zeta) = 1/z.
        let beta = self.inner.cone().beta();
        let (u_zeta, u_zeta_zeta) = self.inner.wirtinger_u(invert(z))?;
        let (ub, ubb) = (u_zeta.conj(), u_zeta_zeta.conj());
        let z2 = z * z;
        let v_z = -ub / z2 - 2.0 * beta / z;
        let v_zz = ubb / (z2 * z2) + 2.0 * ub / (z2 * z) + 2.0 * beta / z2;
        Ok((v_z, v_zz))
    }
}

/// Kelvin image of a family member, again a member with the same
/// curvatures: `Lambda' = Lambda / K`, `z0' = z0 / K` with
/// `K = Lambda^2 + |z0|^2`. For `z0 = 0` this is `lambda' = 1 / lambda`.
pub fn kelvin_family(fam: &FamilyParams) -> Result<FamilyParams> {
    let l = fam.big_lambda();
    let k = l * l + fam.z0().norm_sqr();
    FamilyParams::from_big_lambda(fam.cone(), l / k, fam.z0() / k)
}

/// Kelvin transform of a sampled field onto the inverted grid. Node values
/// map exactly; no interpolation is involved. In the full gauge the
/// log weight is `-4 ln|x|`.
pub fn kelvin_field(field: &ScalarField) -> Result<ScalarField> {
    let grid = field.grid().inverted();
    let (nr, nt) = grid.shape();
    let coeff = match field.gauge() {
        Gauge::Punctured => 4.0 * field.cone().beta(),
        Gauge::Full => 4.0,
    };
    let mut values = Vec::with_capacity(nr * nt);
    for i in 0..nr {
        let rho = grid.radii()[i];
        for j in 0..nt {
            values.push(field.get(nr - 1 - i, j) - coeff * rho.ln());
        }
    }
    ScalarField::new(grid, values, field.gauge(), field.cone())
}

/// Kelvin transform resampled onto `target` by bilinear interpolation in
/// `(ln r, theta)`.
pub fn kelvin_field_on(field: &ScalarField, target: PolarGrid) -> Result<ScalarField> {
    kelvin_field(field)?.resample(target)
}

/// `u(z) - u(z / (lambda0 |z|^2)) - 2 beta ln(1 / (lambda0 |z|^2))` with
/// `lambda0 = lambda^-2`; zero for origin-centered members.
pub fn inversion_symmetry_residual(z: Complex64, fam: &FamilyParams) -> Result<f64> {
    if !fam.centered_at_origin() {
        return Err(Error::CenterNotAtOrigin {
            s0: fam.z0().re,
            t0: fam.z0().im,
        });
    }
    require_off_corner(z)?;
    let lambda0 = fam.lambda().powi(-2);
    let scale = lambda0 * z.norm_sqr();
    let image = z / scale;
    let beta = fam.cone().beta();
    Ok(fam.u(z)? - fam.u(image)? - 2.0 * beta * (1.0 / scale).ln())
}

pub fn projective_connection<F: ConformalField + ?Sized>(
    z: Complex64,
    field: &F,
    mode: ResidualMode,
) -> Result<ProjectiveConnectionValue> {
    let (ut_z, ut_zz) = full_gauge_wirtinger(field, z, mode)?;
    let rho = field.cone().connection_weight();
    Ok(ProjectiveConnectionValue {
        point: z,
        eta: ut_zz - 0.5 * ut_z * ut_z,
        expected: rho / (z * z),
        weight_rho: rho,
    })
}

/// Residual of `h_zz = alpha (alpha + 2) h / (4 z^2)` for `h = e^{-u~/2}`,
/// computed by differentiating `h` directly.
pub fn h_interior_residual(z: Complex64, fam: &FamilyParams) -> Result<Complex64> {
    require_interior(z)?;
    let (h, _, h_zz) = eval_h_derivatives(z, fam)?;
    let alpha = fam.cone().alpha();
    Ok(h_zz - alpha * (alpha + 2.0) * h / (4.0 * z * z))
}

/// Residual of `h_t + c(s) / 2 = 0` on the boundary, the real form of
/// `h_zbar - h_z = -i c / 2`.
pub fn h_boundary_residual(s: f64, fam: &FamilyParams) -> Result<f64> {
    let c = curvatures_from_z0(fam).at(s)?;
    let (_, h_z, _) = eval_h_derivatives(Complex64::new(s, 0.0), fam)?;
    Ok(-2.0 * h_z.im + 0.5 * c)
}

/// `h`-system residuals of an arbitrary field, routed through `u~`.
pub fn h_residuals_with<F: ConformalField + ?Sized>(
    z: Complex64,
    field: &F,
    mode: ResidualMode,
) -> Result<Complex64> {
    require_interior(z)?;
    let (ut_z, ut_zz) = full_gauge_wirtinger(field, z, mode)?;
    let ut = crate::field::value_in_gauge(field, z, Gauge::Full)?;
    let h = (-0.5 * ut).exp();
    let alpha = field.cone().alpha();
    Ok(h * (0.25 * ut_z * ut_z - 0.5 * ut_zz) - alpha * (alpha + 2.0) * h / (4.0 * z * z))
}

/// Schwarzian derivative `{z, w} = z'''/z' - 3/2 (z''/z')^2` from the
/// first three derivatives of `z(w)`.
pub fn schwarzian(d1: Complex64, d2: Complex64, d3: Complex64) -> Complex64 {
    let q = d2 / d1;
    d3 / d1 - 1.5 * q * q
}

/// A holomorphic change of coordinates `z = z(w)`.
pub trait CoordinateChange: Sync {
    fn z(&self, w: Complex64) -> Complex64;
    /// `(z', z'', z''')`.
    fn derivatives(&self, w: Complex64) -> (Complex64, Complex64, Complex64);
}

/// `z = 1 / w`; the upper half-plane in `z` is the lower one in `w`.
pub struct Reciprocal;

impl CoordinateChange for Reciprocal {
    fn z(&self, w: Complex64) -> Complex64 {
        1.0 / w
    }

    fn derivatives(&self, w: Complex64) -> (Complex64, Complex64, Complex64) {
        let w2 = w * w;
        (-1.0 / w2, 2.0 / (w2 * w), -6.0 / (w2 * w2))
    }
}

/// `z = e^w`, taking the strip `0 < Im w < pi` onto the upper half-plane.
pub struct Exponential;

impl CoordinateChange for Exponential {
    fn z(&self, w: Complex64) -> Complex64 {
        w.exp()
    }

    fn derivatives(&self, w: Complex64) -> (Complex64, Complex64, Complex64) {
        let e = w.exp();
        (e, e, e)
    }
}

/// Connection coefficient of the pulled-back metric
/// `e^{u~(z(w)) + ln|z'(w)|^2} |dw|^2`, by finite differences in `w`.
pub fn pullback_connection<F, C>(w: Complex64, field: &F, map: &C) -> Result<Complex64>
where
    F: ConformalField + ?Sized,
    C: CoordinateChange,
{
    let pulled = |p: Complex64| -> Result<f64> {
        let z = map.z(p);
        let (d1, _, _) = map.derivatives(p);
        Ok(crate::field::value_in_gauge(field, z, Gauge::Full)? + d1.norm_sqr().ln())
    };
    let jet = jet4(pulled, w, fourth_order_step(w), true)?;
    let (v_z, v_zz) = jet.wirtinger();
    Ok(v_zz - 0.5 * v_z * v_z)
}

/// Right-hand side of the transformation law,
/// `eta(z(w)) z'(w)^2 + {z, w}`.
pub fn transformed_connection<F, C>(w: Complex64, field: &F, map: &C, mode: ResidualMode) -> Result<Complex64>
where
    F: ConformalField + ?Sized,
    C: CoordinateChange,
{
    let (d1, d2, d3) = map.derivatives(w);
    let eta = projective_connection(map.z(w), field, mode)?.eta;
    Ok(eta * d1 * d1 + schwarzian(d1, d2, d3))
}

/// Radical inverse of `i` in base `b`.
pub fn halton(mut i: usize, b: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// `n` quasi-random points with `ln r` uniform over `[ln r_min, ln r_max]`
/// and `theta` in `(0, pi)`, from the Halton sequence in bases 2 and 3.
pub fn sample_points(n: usize, r_min: f64, r_max: f64) -> Vec<Complex64> {
    let (a, b) = (r_min.ln(), r_max.ln());
    (1..=n)
        .map(|k| {
            let r = (a + (b - a) * halton(k, 2)).exp();
            Complex64::from_polar(r, std::f64::consts::PI * halton(k, 3))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::z0_from_curvatures;
    use crate::field::{FnField, Shifted};
    use std::f64::consts::SQRT_2;

    fn member(alpha: f64, lambda: f64, s0: f64, t0: f64) -> FamilyParams {
        FamilyParams::new(ConeParams::new(alpha).unwrap(), lambda, Complex64::new(s0, t0)).unwrap()
    }

    #[test]
    fn interior_residual_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!(interior_residual(Complex64::i(), &f, ResidualMode::Analytic).unwrap().abs() <= 1e-12);

        let f = member(1.7, 0.8, 0.3, 0.5);
        let z = Complex64::new(0.4, 0.9);
        let res = interior_residual(z, &f, ResidualMode::Analytic).unwrap();
        assert!(res.abs() <= 1e-10 * f.u(z).unwrap().exp().max(1.0));

        let zero = FnField::new(ConeParams::new(0.0).unwrap(), |_| Ok(0.0));
        let res = interior_residual(Complex64::i(), &zero, ResidualMode::Analytic).unwrap();
        assert!((res - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_residual_rejects_boundary_and_corner() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!(interior_residual(Complex64::new(1.0, 0.0), &f, ResidualMode::Analytic).is_err());
        assert!(interior_residual(Complex64::new(0.0, 0.0), &f, ResidualMode::Analytic).is_err());
    }

    #[test]
    fn finite_difference_residual_is_small() {
        let f = member(0.5, 1.3, -0.2, 0.4);
        let z = Complex64::new(-0.6, 0.7);
        assert!(interior_residual(z, &f, ResidualMode::FiniteDifference).unwrap().abs() < 1e-7);
    }

    #[test]
    fn boundary_residual_examples() {
        assert!(boundary_residual(1.0, &member(0.0, 1.0, 0.0, 0.0)).unwrap().abs() < 1e-15);
        assert!(boundary_residual(-1.0, &member(0.5, 1.0, 1.0, 0.0)).unwrap().abs() <= 1e-10);
        let zero = FnField::new(ConeParams::new(0.0).unwrap(), |_| Ok(0.0));
        let bc = BoundaryCurvatures::new(1.0, 0.0).unwrap();
        let res = boundary_residual_with(1.0, &zero, bc, ResidualMode::FiniteDifference).unwrap();
        assert!((res + 1.0).abs() < 1e-12);
        assert!(boundary_residual(0.0, &member(0.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn scalar_curvature_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!((scalar_curvature(Complex64::i(), &f, ResidualMode::Analytic).unwrap() - 1.0).abs() < 1e-14);

        let cone = ConeParams::new(2.3).unwrap();
        let f = z0_from_curvatures(cone, BoundaryCurvatures::new(0.4, -0.7).unwrap(), 1.5, None).unwrap();
        let z = Complex64::new(1.0, 1.0);
        assert!((scalar_curvature(z, &f, ResidualMode::Analytic).unwrap() - 1.0).abs() <= 1e-9);

        let shifted = Shifted { inner: &f, shift: 0.1 };
        let k = scalar_curvature(z, &shifted, ResidualMode::Analytic).unwrap();
        assert!((k - (-0.1f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn kelvin_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        let v = kelvin_transform(&f);
        assert!((v.u(Complex64::i()).unwrap() - 2f64.ln()).abs() < 1e-15);

        let f = member(0.0, 2.0, 0.0, 0.0);
        let image = kelvin_family(&f).unwrap();
        assert!((image.lambda() - 0.5).abs() < 1e-15);
        let v = kelvin_transform(&f);
        for z in [Complex64::new(0.3, 0.2), Complex64::new(-2.0, 0.5), Complex64::new(4.0, 9.0)] {
            assert!((v.u(z).unwrap() - image.u(z).unwrap()).abs() <= 1e-12);
        }

        // removable singularity: v near the corner approaches the image member's corner value
        let f = member(0.0, 1.0, 0.0, 0.0);
        let v = kelvin_transform(&f);
        let limit = kelvin_family(&f).unwrap().corner_value();
        assert!((v.u(Complex64::new(0.0, 0.01)).unwrap() - limit).abs() < 1e-3);
    }

    #[test]
    fn kelvin_maps_off_center_members_into_the_family() {
        let f = member(0.7, 1.4, 0.5, -0.3);
        let image = kelvin_family(&f).unwrap();
        let v = kelvin_transform(&f);
        for z in [Complex64::new(0.3, 0.2), Complex64::new(-1.0, 0.5), Complex64::new(2.0, 3.0)] {
            assert!((v.u(z).unwrap() - image.u(z).unwrap()).abs() <= 1e-12);
        }
        let a = curvatures_from_z0(&f);
        let b = curvatures_from_z0(&image);
        assert!((a.c1 - b.c1).abs() < 1e-12 && (a.c2 - b.c2).abs() < 1e-12);
    }

    #[test]
    fn kelvin_exact_derivatives_match_differences() {
        let f = member(0.4, 0.9, 0.2, 0.3);
        let v = kelvin_transform(&f);
        let z = Complex64::new(0.7, 0.5);
        let jet = fd_jet(&v, z).unwrap();
        let g = v.grad_u(z).unwrap();
        assert!((g[0] - jet.fs).abs() < 1e-8 && (g[1] - jet.ft).abs() < 1e-8);
        assert!((v.laplacian_u(z).unwrap() - jet.laplacian()).abs() < 1e-6);
        let (vz, vzz) = v.wirtinger_u(z).unwrap();
        let (nz, nzz) = jet.wirtinger();
        assert!((vz - nz).norm() < 1e-8 && (vzz - nzz).norm() < 1e-6);
    }

    #[test]
    fn kelvin_field_is_an_involution() {
        let f = member(0.5, 1.1, 0.2, 0.3);
        let grid = PolarGrid::log_uniform(0.1, 10.0, 9, 7).unwrap();
        for gauge in [Gauge::Punctured, Gauge::Full] {
            let sf = ScalarField::sample(grid.clone(), &f, gauge).unwrap();
            let twice = kelvin_field(&kelvin_field(&sf).unwrap()).unwrap();
            for (a, b) in twice.values().iter().zip(sf.values()) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn kelvin_field_matches_pointwise_transform() {
        let f = member(0.5, 1.1, 0.2, 0.3);
        let grid = PolarGrid::log_uniform(0.1, 10.0, 9, 7).unwrap();
        let sf = ScalarField::sample(grid, &f, Gauge::Punctured).unwrap();
        let kf = kelvin_field(&sf).unwrap();
        assert!(kf.sup_error(&kelvin_transform(&f)).unwrap() < 1e-12);
    }

    #[test]
    fn inversion_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!(inversion_symmetry_residual(Complex64::new(0.0, 2.0), &f).unwrap().abs() < 1e-14);
        for alpha in [-0.5, 0.0, 1.3] {
            let f = member(alpha, 1.0, 0.0, 0.0);
            let z = Complex64::from_polar(1.0, 0.7);
            assert!(inversion_symmetry_residual(z, &f).unwrap().abs() < 1e-14);
        }
        let f = member(1.0, 2.0, 0.0, 0.0);
        assert!(inversion_symmetry_residual(Complex64::new(0.0, 3.0), &f).unwrap().abs() <= 1e-11);
        let off = member(1.0, 2.0, 0.1, 0.0);
        assert!(matches!(
            inversion_symmetry_residual(Complex64::i(), &off),
            Err(Error::CenterNotAtOrigin { .. })
        ));
    }

    #[test]
    fn inversion_by_two_independent_evaluations() {
        // alpha = 0, lambda = 1, z = 2i: u(2i) = ln(8/25), u(i/2) = ln(128/25)
        let f = member(0.0, 1.0, 0.0, 0.0);
        assert!((f.u(Complex64::new(0.0, 2.0)).unwrap() - (8.0f64 / 25.0).ln()).abs() < 1e-14);
        assert!((f.u(Complex64::new(0.0, 0.5)).unwrap() - (128.0f64 / 25.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn projective_connection_examples() {
        for (s0, t0) in [(0.0, 0.0), (0.4, 0.3)] {
            let f = member(0.0, 1.7, s0, t0);
            for z in [Complex64::new(0.3, 0.4), Complex64::new(-2.0, 1.0)] {
                let pc = projective_connection(z, &f, ResidualMode::Analytic).unwrap();
                assert!(pc.eta.norm() < 1e-13);
                assert_eq!(pc.weight_rho, 0.0);
            }
        }
        let f = member(1.0, 1.0, 0.0, 0.0);
        let pc = projective_connection(Complex64::new(1.0, 0.0), &f, ResidualMode::Analytic).unwrap();
        assert!((pc.expected - Complex64::new(-1.5, 0.0)).norm() < 1e-15);
        let pc = projective_connection(Complex64::i(), &f, ResidualMode::Analytic).unwrap();
        assert!((pc.expected - Complex64::new(1.5, 0.0)).norm() < 1e-15);
        assert!(pc.deviation() < 1e-12);
    }

    #[test]
    fn h_system_examples() {
        let f = member(0.0, 1.0, 0.0, 0.0);
        let (h, h_z, _) = eval_h_derivatives(Complex64::new(0.3, 0.8), &f).unwrap();
        assert!((h - (1.0 + 0.73) / 8f64.sqrt()).abs() < 1e-15);
        assert!((h_z - Complex64::new(0.3, -0.8) / 8f64.sqrt()).norm() < 1e-15);
        assert!(h_interior_residual(Complex64::new(0.3, 0.8), &f).unwrap().norm() < 1e-15);
        assert!(h_boundary_residual(1.0, &f).unwrap().abs() < 1e-15);

        let f = member(0.5, 1.0, 1.0, 0.0);
        assert!(h_boundary_residual(-2.0, &f).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn h_boundary_derivative_by_differences() {
        // one-sided difference of h in t against -c2/2 = sqrt(2)/2
        let f = member(0.5, 1.0, 1.0, 0.0);
        let h = |t: f64| -> f64 {
            let u = crate::field::value_in_gauge(&f, Complex64::new(-2.0, t), Gauge::Full).unwrap();
            (-0.5 * u).exp()
        };
        let d = 1e-3;
        let ht = (-25.0 * h(0.0) + 48.0 * h(d) - 36.0 * h(2.0 * d) + 16.0 * h(3.0 * d) - 3.0 * h(4.0 * d)) / (12.0 * d);
        assert!((ht - SQRT_2 / 2.0).abs() < 1e-8);
    }

    #[test]
    fn generic_h_route_agrees_with_product_rule() {
        let f = member(1.3, 0.7, 0.2, -0.4);
        let z = Complex64::new(0.5, 0.6);
        let a = h_interior_residual(z, &f).unwrap();
        let b = h_residuals_with(z, &f, ResidualMode::Analytic).unwrap();
        assert!(a.norm() < 1e-10 && b.norm() < 1e-10);
    }

    #[test]
    fn connection_is_real_on_both_rays() {
        let f = member(0.6, 1.2, 0.4, 0.3);
        for s in [0.5, 2.0, -0.5, -3.0] {
            let pc = projective_connection(Complex64::new(s, 0.0), &f, ResidualMode::Analytic).unwrap();
            assert!(pc.eta.im.abs() <= 1e-9);
        }
    }

    #[test]
    fn sample_points_stay_inside() {
        let pts = sample_points(200, 0.1, 10.0);
        assert!(pts.iter().all(|z| z.im > 0.0 && z.norm() >= 0.1 && z.norm() <= 10.0));
        assert_eq!(halton(3, 2), 0.75);
    }

    #[test]
    fn schwarzian_of_mobius_vanishes() {
        let w = Complex64::new(0.3, -0.7);
        let (a, b, c) = Reciprocal.derivatives(w);
        assert!(schwarzian(a, b, c).norm() < 1e-13);
        let (a, b, c) = Exponential.derivatives(w);
        assert!((schwarzian(a, b, c) + 0.5).norm() < 1e-15);
    }

    #[test]
    fn transformation_law_under_coordinate_changes() {
        let f = member(0.8, 1.1, 0.3, 0.2);
        for w in [Complex64::new(0.4, -0.9), Complex64::new(-0.7, -0.5)] {
            let lhs = pullback_connection(w, &f, &Reciprocal).unwrap();
            let rhs = transformed_connection(w, &f, &Reciprocal, ResidualMode::Analytic).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
        }
        for w in [Complex64::new(0.1, 1.2), Complex64::new(-0.3, 2.5)] {
            let lhs = pullback_connection(w, &f, &Exponential).unwrap();
            let rhs = transformed_connection(w, &f, &Exponential, ResidualMode::Analytic).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
        }
    }
}
