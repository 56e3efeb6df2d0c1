//! Grid CSV files with header `r,theta,s,t,u,e_u`, rows ordered by angle
//! first and radius second.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::ScalarField;

pub const HEADER: [&str; 6] = ["r", "theta", "s", "t", "u", "e_u"];

/// Shortest decimal that parses back to the same `f64`, with or without an
/// exponent, whichever is shorter.
pub fn format_real(x: f64) -> String {
    let plain = format!("{x}");
    let exp = format!("{x:e}");
    if exp.len() < plain.len() {
        exp
    } else {
        plain
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub r: f64,
    pub theta: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
    pub e_u: f64,
}

impl GridRow {
    pub fn point(&self) -> Complex64 {
        Complex64::new(self.s, self.t)
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

pub fn write_field<W: Write>(field: &ScalarField, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(io)?;
    let grid = field.grid();
    let (nr, nt) = grid.shape();
    for j in 0..nt {
        for i in 0..nr {
            let z = grid.point(i, j);
            let u = field.get(i, j);
            let row = [grid.radii()[i], grid.angles()[j], z.re, z.im, u, u.exp()];
            w.write_record(row.iter().map(|v| format_real(*v))).map_err(io)?;
        }
    }
    w.flush().map_err(io)?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<GridRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| Error::Parse(format!("cannot read header: {e}")))?;
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Parse(format!(
            "header must be exactly {:?} (got {:?})",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(format!("row {}: {e}", n + 1)))?;
        let mut vals = [0.0; 6];
        for (k, slot) in vals.iter_mut().enumerate() {
            let cell = rec
                .get(k)
                .ok_or_else(|| Error::Parse(format!("row {}: missing column {}", n + 1, HEADER[k])))?;
            *slot = cell
                .parse()
                .map_err(|e| Error::Parse(format!("row {}, column {}: {cell:?}: {e}", n + 1, HEADER[k])))?;
        }
        rows.push(GridRow {
            r: vals[0],
            theta: vals[1],
            s: vals[2],
            t: vals[3],
            u: vals[4],
            e_u: vals[5],
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{ConeParams, FamilyParams, Gauge};
    use crate::field::PolarGrid;

    #[test]
    fn shortest_forms() {
        assert_eq!(format_real(0.5), "0.5");
        assert_eq!(format_real(1e-7), "1e-7");
        assert_eq!(format_real(123456.0), "123456");
        assert_eq!(format_real(2.5e300), "2.5e300");
        for x in [0.1, 1.0 / 3.0, 6.02e23, -4.9e-324, std::f64::consts::PI] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let fam = FamilyParams::new(ConeParams::new(0.3).unwrap(), 1.2, Complex64::new(0.1, 0.2)).unwrap();
        let grid = PolarGrid::log_uniform(0.1, 10.0, 5, 4).unwrap();
        let field = ScalarField::sample(grid, &fam, Gauge::Punctured).unwrap();
        let mut buf = Vec::new();
        write_field(&field, &mut buf).unwrap();
        let rows = read_rows(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 20);
        // angle-major order
        assert_eq!(rows[1].theta, rows[0].theta);
        assert!(rows[5].theta > rows[4].theta);
        for (k, row) in rows.iter().enumerate() {
            let (j, i) = (k / 5, k % 5);
            assert_eq!(row.u.to_bits(), field.get(i, j).to_bits());
            assert_eq!(row.r.to_bits(), field.grid().radii()[i].to_bits());
        }
    }

    #[test]
    fn missing_column_is_a_parse_error() {
        let text = "r,theta,s,t,u\n1,0,1,0,0.5\n";
        assert!(matches!(read_rows(text.as_bytes()), Err(Error::Parse(_))));
        let text = "r,theta,s,t,u,e_u\n1,0,1,0,0.5\n";
        assert!(matches!(read_rows(text.as_bytes()), Err(Error::Parse(_))));
    }
}
