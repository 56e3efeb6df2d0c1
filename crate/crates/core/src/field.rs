//! Conformal factors as evaluable fields and as sampled polar grids.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::conformal::{
    eval_grad_u, eval_laplacian_u, eval_u, eval_wirtinger_u, halfplane_polar, ConeParams,
    FamilyParams, Gauge,
};
use crate::error::{domain, Error, Result};
use crate::numdiff::{fourth_order_step, jet4};

/// A conformal factor `u` (punctured gauge) on the closed upper half-plane.
///
/// Only [`ConformalField::u`] is required; derivatives default to
/// fourth-order finite differences.
pub trait ConformalField: Sync {
    fn cone(&self) -> ConeParams;

    fn u(&self, z: Complex64) -> Result<f64>;

    /// True when the derivative methods are exact rather than numerical.
    fn has_exact_derivatives(&self) -> bool {
        false
    }

    fn grad_u(&self, z: Complex64) -> Result<[f64; 2]> {
        Ok(fd_jet(self, z)?.gradient())
    }

    fn laplacian_u(&self, z: Complex64) -> Result<f64> {
        Ok(fd_jet(self, z)?.laplacian())
    }

    /// `(u_z, u_zz)`.
    fn wirtinger_u(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        Ok(fd_jet(self, z)?.wirtinger())
    }
}

/// Fourth-order finite-difference jet of `u`, ignoring any exact derivatives.
pub fn fd_jet<F: ConformalField + ?Sized>(field: &F, z: Complex64) -> Result<crate::numdiff::Jet2> {
    jet4(|p| field.u(p), z, fourth_order_step(z), false)
}

/// Value of a field in the requested gauge.
pub fn value_in_gauge<F: ConformalField + ?Sized>(field: &F, z: Complex64, gauge: Gauge) -> Result<f64> {
    let u = field.u(z)?;
    let alpha = field.cone().alpha();
    match gauge {
        Gauge::Punctured => Ok(u),
        Gauge::Full if alpha == 0.0 => Ok(u),
        Gauge::Full => {
            if z.norm() == 0.0 {
                return Err(domain("full-gauge factor is singular at the corner"));
            }
            Ok(u + 2.0 * alpha * z.norm().ln())
        }
    }
}

impl ConformalField for FamilyParams {
    fn cone(&self) -> ConeParams {
        FamilyParams::cone(self)
    }

    fn u(&self, z: Complex64) -> Result<f64> {
        eval_u(z, self, Gauge::Punctured)
    }

    fn has_exact_derivatives(&self) -> bool {
        true
    }

    fn grad_u(&self, z: Complex64) -> Result<[f64; 2]> {
        eval_grad_u(z, self, Gauge::Punctured)
    }

    fn laplacian_u(&self, z: Complex64) -> Result<f64> {
        eval_laplacian_u(z, self, Gauge::Punctured)
    }

    fn wirtinger_u(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        eval_wirtinger_u(z, self)
    }
}

/// A field given by a closure.
pub struct FnField<F> {
    cone: ConeParams,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    pub fn new(cone: ConeParams, f: F) -> Self {
        FnField { cone, f }
    }
}

impl<F> ConformalField for FnField<F>
where
    F: Fn(Complex64) -> Result<f64> + Sync,
{
    fn cone(&self) -> ConeParams {
        self.cone
    }

    fn u(&self, z: Complex64) -> Result<f64> {
        (self.f)(z)
    }
}

/// `u + shift`; keeps exact derivatives of the inner field.
pub struct Shifted<'a, F: ?Sized> {
    pub inner: &'a F,
    pub shift: f64,
}

impl<F: ConformalField + ?Sized> ConformalField for Shifted<'_, F> {
    fn cone(&self) -> ConeParams {
        self.inner.cone()
    }

    fn u(&self, z: Complex64) -> Result<f64> {
        Ok(self.inner.u(z)? + self.shift)
    }

    fn has_exact_derivatives(&self) -> bool {
        self.inner.has_exact_derivatives()
    }

    fn grad_u(&self, z: Complex64) -> Result<[f64; 2]> {
        self.inner.grad_u(z)
    }

    fn laplacian_u(&self, z: Complex64) -> Result<f64> {
        self.inner.laplacian_u(z)
    }

    fn wirtinger_u(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.inner.wirtinger_u(z)
    }
}

/// Tensor grid of radii and angles over the closed upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radii: Vec<f64>,
    angles: Vec<f64>,
}

impl PolarGrid {
    pub fn new(radii: Vec<f64>, angles: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || angles.is_empty() {
            return Err(Error::InvalidParameter("grid must have at least one radius and angle".into()));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("grid radii must be finite and > 0".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid radii must be strictly increasing".into()));
        }
        if angles.iter().any(|t| !(0.0..=PI).contains(t)) {
            return Err(Error::InvalidParameter("grid angles must lie in [0, pi]".into()));
        }
        if angles.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid angles must be strictly increasing".into()));
        }
        Ok(PolarGrid { radii, angles })
    }

    /// `n_r` radii uniform in `ln r` over `[r_min, r_max]` and `n_theta`
    /// angles uniform over `[0, pi]`, endpoints included.
    pub fn log_uniform(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) || n_r < 2 || n_theta < 2 {
            return Err(Error::InvalidParameter(format!(
                "need 0 < r_min < r_max and at least 2x2 nodes (got r in ({r_min}, {r_max}), {n_r}x{n_theta})"
            )));
        }
        let (a, b) = (r_min.ln(), r_max.ln());
        let radii = (0..n_r)
            .map(|i| {
                if i == n_r - 1 {
                    r_max
                } else if i == 0 {
                    r_min
                } else {
                    (a + (b - a) * i as f64 / (n_r - 1) as f64).exp()
                }
            })
            .collect();
        Self::new(radii, uniform_angles(n_theta))
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.radii.len(), self.angles.len())
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[i], self.angles[j])
    }

    /// Grid with radii `1 / r` (in increasing order) and the same angles.
    pub fn inverted(&self) -> PolarGrid {
        PolarGrid {
            radii: self.radii.iter().rev().map(|r| 1.0 / r).collect(),
            angles: self.angles.clone(),
        }
    }
}

/// `n` angles uniform over `[0, pi]`, endpoints exact.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            if j == n - 1 {
                PI
            } else {
                PI * j as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// A sampled conformal factor. Values are stored radius-major:
/// `values[i * n_theta + j]` sits at `(radii[i], angles[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PolarGrid,
    values: Vec<f64>,
    gauge: Gauge,
    cone: ConeParams,
}

impl ScalarField {
    pub fn new(grid: PolarGrid, values: Vec<f64>, gauge: Gauge, cone: ConeParams) -> Result<Self> {
        let (nr, nt) = grid.shape();
        if values.len() != nr * nt {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for a {nr}x{nt} grid",
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "field value at node ({}, {}) is not finite",
                k / nt,
                k % nt
            )));
        }
        Ok(ScalarField {
            grid,
            values,
            gauge,
            cone,
        })
    }

    pub fn sample<F: ConformalField + ?Sized>(grid: PolarGrid, field: &F, gauge: Gauge) -> Result<Self> {
        let (nr, nt) = grid.shape();
        let mut values = Vec::with_capacity(nr * nt);
        for i in 0..nr {
            for j in 0..nt {
                values.push(value_in_gauge(field, grid.point(i, j), gauge)?);
            }
        }
        Self::new(grid, values, gauge, field.cone())
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gauge(&self) -> Gauge {
        self.gauge
    }

    pub fn cone(&self) -> ConeParams {
        self.cone
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.angles.len() + j]
    }

    pub fn to_gauge(&self, gauge: Gauge) -> ScalarField {
        if gauge == self.gauge {
            return self.clone();
        }
        let sign = if gauge == Gauge::Full { 1.0 } else { -1.0 };
        let nt = self.grid.angles.len();
        let two_alpha = 2.0 * self.cone.alpha();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| v + sign * two_alpha * self.grid.radii[k / nt].ln())
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
            gauge,
            cone: self.cone,
        }
    }

    /// Bilinear interpolation in `(ln r, theta)`.
    pub fn interpolate(&self, z: Complex64) -> Result<f64> {
        let (r, theta) = halfplane_polar(z)?;
        let radii = &self.grid.radii;
        let angles = &self.grid.angles;
        let slack = 1e-12;
        let lr = r.ln();
        let (l0, l1) = (radii[0].ln(), radii[radii.len() - 1].ln());
        if r == 0.0 || lr < l0 - slack || lr > l1 + slack {
            return Err(domain(format!("radius {r} outside the sampled range")));
        }
        if theta < angles[0] - slack || theta > angles[angles.len() - 1] + slack {
            return Err(domain(format!("angle {theta} outside the sampled range")));
        }
        let (i, fi) = bracket(radii.len(), |k| radii[k].ln(), lr);
        let (j, fj) = bracket(angles.len(), |k| angles[k], theta);
        let nt = angles.len();
        let at = |a: usize, b: usize| self.values[a * nt + b];
        let i1 = (i + 1).min(radii.len() - 1);
        let j1 = (j + 1).min(nt - 1);
        Ok((1.0 - fi) * ((1.0 - fj) * at(i, j) + fj * at(i, j1)) + fi * ((1.0 - fj) * at(i1, j) + fj * at(i1, j1)))
    }

    pub fn resample(&self, grid: PolarGrid) -> Result<ScalarField> {
        let (nr, nt) = grid.shape();
        let mut values = Vec::with_capacity(nr * nt);
        for i in 0..nr {
            for j in 0..nt {
                values.push(self.interpolate(grid.point(i, j))?);
            }
        }
        ScalarField::new(grid, values, self.gauge, self.cone)
    }

    /// Largest absolute difference against a field evaluated at the nodes.
    pub fn sup_error<F: ConformalField + ?Sized>(&self, reference: &F) -> Result<f64> {
        let (nr, nt) = self.grid.shape();
        let mut worst = 0.0f64;
        for i in 0..nr {
            for j in 0..nt {
                let exact = value_in_gauge(reference, self.grid.point(i, j), self.gauge)?;
                worst = worst.max((self.get(i, j) - exact).abs());
            }
        }
        Ok(worst)
    }
}

/// Index of the cell containing `x` among `n` increasing nodes and the
/// fractional position inside it.
fn bracket(n: usize, node: impl Fn(usize) -> f64, x: f64) -> (usize, f64) {
    if n == 1 {
        return (0, 0.0);
    }
    let mut lo = 0;
    let mut hi = n - 1;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if node(mid) <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (node(lo), node(hi));
    (lo, ((x - a) / (b - a)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bubble() -> FamilyParams {
        FamilyParams::new(ConeParams::new(0.6).unwrap(), 1.2, Complex64::new(0.3, 0.4)).unwrap()
    }

    #[test]
    fn grid_rejects_bad_layouts() {
        assert!(PolarGrid::new(vec![0.0, 1.0], vec![0.0]).is_err());
        assert!(PolarGrid::new(vec![1.0, 1.0], vec![0.0]).is_err());
        assert!(PolarGrid::new(vec![1.0], vec![0.0, 4.0]).is_err());
        assert!(PolarGrid::log_uniform(0.1, 10.0, 4, 3).is_ok());
    }

    #[test]
    fn log_uniform_endpoints_are_exact() {
        let g = PolarGrid::log_uniform(0.05, 20.0, 17, 9).unwrap();
        assert_eq!(g.radii()[0], 0.05);
        assert_eq!(*g.radii().last().unwrap(), 20.0);
        assert_eq!(*g.angles().last().unwrap(), PI);
        let ratios: Vec<f64> = g.radii().windows(2).map(|w| w[1] / w[0]).collect();
        assert!(ratios.iter().all(|q| (q / ratios[0] - 1.0).abs() < 1e-12));
    }

    #[test]
    fn gauge_round_trip() {
        let f = bubble();
        let grid = PolarGrid::log_uniform(0.1, 5.0, 6, 5).unwrap();
        let punct = ScalarField::sample(grid.clone(), &f, Gauge::Punctured).unwrap();
        let full = ScalarField::sample(grid, &f, Gauge::Full).unwrap();
        let back = full.to_gauge(Gauge::Punctured);
        for (a, b) in back.values().iter().zip(punct.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolation_reproduces_nodes_and_is_exact_for_bilinear_data() {
        let grid = PolarGrid::log_uniform(0.5, 8.0, 5, 4).unwrap();
        let cone = ConeParams::new(0.0).unwrap();
        let lin = FnField::new(cone, |z: Complex64| {
            let (r, t) = halfplane_polar(z)?;
            Ok(2.0 * r.ln() - 0.5 * t + 0.25 * r.ln() * t)
        });
        let sf = ScalarField::sample(grid.clone(), &lin, Gauge::Punctured).unwrap();
        assert_eq!(sf.interpolate(grid.point(2, 1)).unwrap(), sf.get(2, 1));
        let z = Complex64::from_polar(1.7, 1.1);
        assert!((sf.interpolate(z).unwrap() - lin.u(z).unwrap()).abs() < 1e-12);
        assert!(sf.interpolate(Complex64::from_polar(20.0, 1.0)).is_err());
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let grid = PolarGrid::log_uniform(0.5, 8.0, 2, 2).unwrap();
        let cone = ConeParams::new(0.0).unwrap();
        assert!(ScalarField::new(grid, vec![0.0, 1.0, f64::NAN, 0.0], Gauge::Punctured, cone).is_err());
    }

    #[test]
    fn exact_and_numerical_derivatives_agree() {
        let f = bubble();
        let z = Complex64::new(0.8, 0.6);
        let exact = f.grad_u(z).unwrap();
        let jet = fd_jet(&f, z).unwrap();
        assert!((exact[0] - jet.fs).abs() < 1e-9 && (exact[1] - jet.ft).abs() < 1e-9);
        assert!((f.laplacian_u(z).unwrap() - jet.laplacian()).abs() < 1e-7);
        let (ez, ezz) = f.wirtinger_u(z).unwrap();
        let (nz, nzz) = jet.wirtinger();
        assert!((ez - nz).norm() < 1e-9 && (ezz - nzz).norm() < 1e-7);
    }
}
