//! Adaptive 21-point Gauss-Kronrod integration on a finite interval.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Number of trailing subdivisions inspected for monotone growth.
const GROWTH_WINDOW: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Node abscissae of the 21-point rule mapped to `[a, b]`, in a fixed order.
fn nodes(a: f64, b: f64) -> [f64; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [c; 21];
    for k in 0..10 {
        x[2 * k] = c - h * XGK[k];
        x[2 * k + 1] = c + h * XGK[k];
    }
    x
}

fn rule(a: f64, b: f64, fx: &[f64; 21]) -> Panel {
    let h = 0.5 * (b - a);
    let fc = fx[20];
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut resabs = fc.abs() * WGK[10];
    for k in 0..10 {
        let pair = fx[2 * k] + fx[2 * k + 1];
        kronrod += WGK[k] * pair;
        resabs += WGK[k] * (fx[2 * k].abs() + fx[2 * k + 1].abs());
        // Gauss nodes are the odd-indexed Kronrod nodes.
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for k in 0..10 {
        resasc += WGK[k] * ((fx[2 * k] - mean).abs() + (fx[2 * k + 1] - mean).abs());
    }
    let value = kronrod * h;
    let (resabs, resasc) = (resabs * h.abs(), resasc * h.abs());
    let mut error = ((kronrod - gauss) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

fn panel<F>(f: &F, a: f64, b: f64, parallel: bool) -> Result<Panel>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let x = nodes(a, b);
    let mut fx = [0.0; 21];
    if parallel {
        let vals: Vec<Result<f64>> = x.par_iter().map(|&t| f(t)).collect();
        for (slot, v) in fx.iter_mut().zip(vals) {
            *slot = v?;
        }
    } else {
        for (slot, &t) in fx.iter_mut().zip(x.iter()) {
            *slot = f(t)?;
        }
    }
    for v in &fx {
        if !v.is_finite() {
            return Err(Error::NonConvergence {
                estimate: f64::NAN,
                error: f64::INFINITY,
                subdivisions: 0,
                monotone_growth: false,
            });
        }
    }
    Ok(rule(a, b, &fx))
}

fn monotone_growth(history: &[f64]) -> bool {
    if history.len() <= GROWTH_WINDOW {
        return false;
    }
    let tail = &history[history.len() - GROWTH_WINDOW - 1..];
    tail.windows(2).all(|w| w[1].abs() > w[0].abs())
        && tail.windows(2).all(|w| (w[1] - w[0]).signum() == (tail[1] - tail[0]).signum())
}

/// Integrate `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until the total error meets the tolerance. Panels are processed
/// in a deterministic order; `parallel` only spreads the node evaluations
/// of a panel over threads.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: Tolerance, parallel: bool) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
            evaluations: 0,
        });
    }
    let mut panels = vec![panel(f, a, b, parallel)?];
    let mut evaluations = 21;
    let mut history = vec![panels[0].value];
    let mut subdivisions = 0;
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Integral {
                value,
                error,
                subdivisions,
                evaluations,
            });
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::NonConvergence {
                estimate: value,
                error,
                subdivisions,
                monotone_growth: monotone_growth(&history),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .fold(0, |best, (i, p)| if p.error > panels[best].error { i } else { best });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        let left = panel(f, p.a, mid, parallel);
        let right = panel(f, mid, p.b, parallel);
        let (left, right) = match (left, right) {
            (Ok(l), Ok(r)) => (l, r),
            (Err(Error::NonConvergence { .. }), _) | (_, Err(Error::NonConvergence { .. })) => {
                return Err(Error::NonConvergence {
                    estimate: value,
                    error: f64::INFINITY,
                    subdivisions,
                    monotone_growth: monotone_growth(&history),
                })
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        evaluations += 42;
        subdivisions += 1;
        panels.push(left);
        panels.push(right);
        history.push(panels.iter().map(|p| p.value).sum());
    }
}
