//! Finite-difference derivatives of real functions on the closed upper
//! half-plane. Stencils switch to one-sided differences in `t` when a
//! centered stencil would leave the half-plane.

use num_complex::Complex64;

use crate::error::Result;

/// Step used by the fourth-order stencils, relative to `max(1, |z|)`.
///
/// Balances `h^4` truncation against `eps / h^2` round-off in second
/// derivatives.
pub const FD_STEP: f64 = 2e-3;

/// `eps^(1/3)`, the classical step for second-order central differences.
pub fn central_step(z: Complex64) -> f64 {
    f64::EPSILON.cbrt() * z.norm().max(1.0)
}

pub fn fourth_order_step(z: Complex64) -> f64 {
    FD_STEP * z.norm().max(1.0)
}

/// Cartesian first and second derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub f: f64,
    pub fs: f64,
    pub ft: f64,
    pub fss: f64,
    pub ftt: f64,
    pub fst: f64,
}

impl Jet2 {
    pub fn gradient(&self) -> [f64; 2] {
        [self.fs, self.ft]
    }

    pub fn laplacian(&self) -> f64 {
        self.fss + self.ftt
    }

    /// `(f_z, f_zz)` with `d/dz = (d/ds - i d/dt) / 2`.
    pub fn wirtinger(&self) -> (Complex64, Complex64) {
        let fz = Complex64::new(self.fs, -self.ft) * 0.5;
        let fzz = Complex64::new(self.fss - self.ftt, -2.0 * self.fst) * 0.25;
        (fz, fzz)
    }
}

const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
const D2: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];
const D1_FWD: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const D2_FWD: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];

fn d1_centered<F: Fn(f64) -> Result<f64>>(f: &F, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, w) in D1 {
        acc += w * f(k * h)?;
    }
    Ok(acc / (12.0 * h))
}

fn d1_forward<F: Fn(f64) -> Result<f64>>(f: &F, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, w) in D1_FWD.iter().enumerate() {
        acc += w * f(k as f64 * h)?;
    }
    Ok(acc / (12.0 * h))
}

fn d2_centered<F: Fn(f64) -> Result<f64>>(f: &F, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, w) in D2 {
        acc += w * f(k * h)?;
    }
    Ok(acc / (12.0 * h * h))
}

fn d2_forward<F: Fn(f64) -> Result<f64>>(f: &F, h: f64) -> Result<f64> {
    let mut acc = 0.0;
    for (k, w) in D2_FWD.iter().enumerate() {
        acc += w * f(k as f64 * h)?;
    }
    Ok(acc / (12.0 * h * h))
}

/// Fourth-order jet of `f` at `z`. If `allow_below` is false and `z` is
/// within two steps of the real axis, `t`-derivatives are one-sided.
pub fn jet4<F>(f: F, z: Complex64, h: f64, allow_below: bool) -> Result<Jet2>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let one_sided = !allow_below && z.im < 2.0 * h;
    let along_s = |dz: f64| f(z + dz);
    let along_t = |dt: f64| f(z + Complex64::new(0.0, dt));
    let f0 = f(z)?;
    let fs = d1_centered(&along_s, h)?;
    let fss = d2_centered(&along_s, h)?;
    let (ft, ftt, fst) = if one_sided {
        let ft = d1_forward(&along_t, h)?;
        let ftt = d2_forward(&along_t, h)?;
        let fst = d1_forward(&|dt: f64| d1_centered(&|ds: f64| f(z + Complex64::new(ds, dt)), h), h)?;
        (ft, ftt, fst)
    } else {
        let ft = d1_centered(&along_t, h)?;
        let ftt = d2_centered(&along_t, h)?;
        let fst = d1_centered(&|dt: f64| d1_centered(&|ds: f64| f(z + Complex64::new(ds, dt)), h), h)?;
        (ft, ftt, fst)
    };
    Ok(Jet2 {
        f: f0,
        fs,
        ft,
        fss,
        ftt,
        fst,
    })
}

/// Second-order central gradient with step `h`.
pub fn central_gradient<F>(f: F, z: Complex64, h: f64) -> Result<[f64; 2]>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let ds = Complex64::new(h, 0.0);
    let dt = Complex64::new(0.0, h);
    Ok([
        (f(z + ds)? - f(z - ds)?) / (2.0 * h),
        (f(z + dt)? - f(z - dt)?) / (2.0 * h),
    ])
}

/// Five-point Laplacian with step `h`.
pub fn central_laplacian<F>(f: F, z: Complex64, h: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let ds = Complex64::new(h, 0.0);
    let dt = Complex64::new(0.0, h);
    let c = f(z)?;
    Ok((f(z + ds)? + f(z - ds)? + f(z + dt)? + f(z - dt)? - 4.0 * c) / (h * h))
}
