//! Flat `key = value` configuration files and merging with flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Keys accepted in a configuration file; the same names as the flags.
const KEYS: [&str; 12] = [
    "alpha", "lambda", "c1", "c2", "s0", "grid", "rmin", "rmax", "out", "tol", "input", "radius",
];

/// Options shared by all subcommands after merging file and flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub s0: Option<f64>,
    pub grid: Option<(usize, usize)>,
    pub rmin: Option<f64>,
    pub rmax: Option<f64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub input: Option<PathBuf>,
    pub radius: Option<Vec<f64>>,
}

impl Settings {
    /// Fills every unset field from `base`.
    pub fn or(self, base: Settings) -> Settings {
        Settings {
            alpha: self.alpha.or(base.alpha),
            lambda: self.lambda.or(base.lambda),
            c1: self.c1.or(base.c1),
            c2: self.c2.or(base.c2),
            s0: self.s0.or(base.s0),
            grid: self.grid.or(base.grid),
            rmin: self.rmin.or(base.rmin),
            rmax: self.rmax.or(base.rmax),
            out: self.out.or(base.out),
            tol: self.tol.or(base.tol),
            input: self.input.or(base.input),
            radius: self.radius.or(base.radius),
        }
    }
}

pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Parse(format!("grid must look like NRxNT (got {s:?})")))?;
    let n = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad grid size {t:?}: {e}")))
    };
    let (nr, nt) = (n(a)?, n(b)?);
    if nr < 2 || nt < 2 {
        return Err(Error::Parse(format!("grid needs at least 2 nodes per direction (got {s})")));
    }
    Ok((nr, nt))
}

fn parse_real(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("{key} = {v:?}: {e}")))
}

pub fn parse_config(text: &str) -> Result<Settings> {
    let mut seen = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
        let key = k.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse(format!("line {}: unknown key {key:?}", lineno + 1)));
        }
        if seen.insert(key.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse(format!("line {}: duplicate key {key:?}", lineno + 1)));
        }
    }
    let real = |k: &str| seen.get(k).map(|v| parse_real(k, v)).transpose();
    Ok(Settings {
        alpha: real("alpha")?,
        lambda: real("lambda")?,
        c1: real("c1")?,
        c2: real("c2")?,
        s0: real("s0")?,
        grid: seen.get("grid").map(|v| parse_grid(v)).transpose()?,
        rmin: real("rmin")?,
        rmax: real("rmax")?,
        out: seen.get("out").map(PathBuf::from),
        tol: real("tol")?,
        input: seen.get("input").map(PathBuf::from),
        radius: seen
            .get("radius")
            .map(|v| v.split(',').map(|p| parse_real("radius", p)).collect::<Result<Vec<_>>>())
            .transpose()?,
    })
}

pub fn read_config(path: &Path) -> Result<Settings> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}
