//! Banded LU factorization with partial pivoting, column-major band
//! storage as in LAPACK's `gbtrf`.

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals. Storage
/// reserves `kl` extra super-diagonals for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    ab: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ldab,
            ab: vec![0.0; ldab * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i <= j + self.kl && j <= i + self.ku
    }

    fn pos(&self, i: usize, j: usize) -> usize {
        (self.kl + self.ku + i - j) + j * self.ldab
    }

    /// Adds `v` to entry `(i, j)`. Panics outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let p = self.pos(i, j);
        self.ab[p] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if self.in_band(i, j) {
            self.ab[self.pos(i, j)]
        } else {
            0.0
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for j in 0..self.n {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            for (i, yi) in y.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *yi += self.ab[self.pos(i, j)] * x[j];
            }
        }
        y
    }

    /// Factorizes in place. A pivot below `tiny` times the largest entry
    /// of its column is reported as `IllPosed`.
    pub fn factorize(mut self) -> Result<BandLu> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let kv = kl + ku;
        let scale = self.ab.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut ipiv = vec![0usize; n];
        let mut ju = 0usize;
        let ab = &mut self.ab;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab + kv;
            let mut jp = 0;
            let mut best = ab[col].abs();
            for i in 1..=km {
                let v = ab[col + i].abs();
                if v > best {
                    best = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            if !(best > tiny) {
                return Err(Error::IllPosed(format!(
                    "pivot {best:e} in column {j} of {n} is below {tiny:e}"
                )));
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                // row j and row j + jp, columns j..=ju
                for c in j..=ju {
                    let a = kv + j - c + c * ldab;
                    ab.swap(a, a + jp);
                }
            }
            if km > 0 {
                let inv = 1.0 / ab[col];
                for v in &mut ab[col + 1..=col + km] {
                    *v *= inv;
                }
                for c in j + 1..=ju {
                    let top = kv + j - c + c * ldab;
                    let a = ab[top];
                    if a != 0.0 {
                        // column c starts after the multipliers of column j
                        let (left, right) = ab.split_at_mut(top);
                        let multipliers = &left[col + 1..=col + km];
                        for (t, m) in right[1..=km].iter_mut().zip(multipliers) {
                            *t -= m * a;
                        }
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            kv,
            ldab,
            ab: std::mem::take(&mut self.ab),
            ipiv,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    kv: usize,
    ldab: usize,
    ab: Vec<f64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, kv, ldab) = (self.n, self.kl, self.kv, self.ldab);
        assert_eq!(b.len(), n);
        for j in 0..n.saturating_sub(1) {
            let lm = kl.min(n - 1 - j);
            let l = self.ipiv[j];
            if l != j {
                b.swap(l, j);
            }
            let bj = b[j];
            if bj != 0.0 {
                let col = j * ldab + kv;
                for i in 1..=lm {
                    b[j + i] -= self.ab[col + i] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            let col = j * ldab + kv;
            b[j] /= self.ab[col];
            let bj = b[j];
            if bj != 0.0 {
                let lo = j.saturating_sub(kv);
                for i in lo..j {
                    b[i] -= self.ab[col - (j - i)] * bj;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn solves_a_matrix_that_needs_pivoting() {
        let n = 40;
        let (kl, ku) = (3, 2);
        let mut dense = vec![vec![0.0; n]; n];
        let mut band = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // small diagonal forces row exchanges
                let v = if i == j { 1e-3 } else { ((i * 7 + j * 3) % 11) as f64 - 5.0 };
                dense[i][j] = v;
                band.add(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut b = dense_mul(&dense, &x);
        assert_eq!(b, band.mul_vec(&x));
        band.factorize().unwrap().solve_in_place(&mut b);
        for (got, want) in b.iter().zip(&x) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn singular_matrix_is_ill_posed() {
        let mut band = BandMatrix::zeros(3, 1, 1);
        band.add(0, 0, 1.0);
        band.add(0, 1, 2.0);
        band.add(1, 0, 2.0);
        band.add(1, 1, 4.0);
        band.add(2, 2, 1.0);
        assert!(matches!(band.factorize(), Err(Error::IllPosed(_))));
    }
}
