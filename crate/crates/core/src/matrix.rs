//! Dense complex matrices in row-major storage, with the small set of
//! kernels the rest of the library needs: products, norms, pivoted LU,
//! linear solves and determinants.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries. Rejects length mismatches
    /// and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// First entry with a nonzero imaginary part, if any.
    pub fn first_nonreal_entry(&self) -> Option<(usize, usize)> {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self[(r, c)].im != 0.0 {
                    return Some((r, c));
                }
            }
        }
        None
    }

    /// Relative Frobenius distance ||self - other||_F / max(1, ||other||_F).
    pub fn relative_distance(&self, other: &Self) -> f64 {
        self.sub(other).frobenius_norm() / other.frobenius_norm().max(1.0)
    }

    /// Pivoted LU factorization. Fails only on an exactly zero pivot.
    pub fn lu(&self) -> Result<Lu> {
        assert!(self.is_square(), "LU requires a square matrix");
        let n = self.rows;
        let mut f = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut p = k;
            let mut best = f[(k, k)].norm();
            for r in k + 1..n {
                let v = f[(r, k)].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularFactorization);
            }
            if p != k {
                for c in 0..n {
                    let tmp = f[(k, c)];
                    f[(k, c)] = f[(p, c)];
                    f[(p, c)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = f[(k, k)];
            for r in k + 1..n {
                let m = f[(r, k)] / pivot;
                f[(r, k)] = m;
                for c in k + 1..n {
                    let sub = m * f[(k, c)];
                    f[(r, c)] -= sub;
                }
            }
        }
        Ok(Lu {
            factors: f,
            perm,
            sign,
        })
    }

    /// Solve self * X = B.
    pub fn solve(&self, b: &Self) -> Result<Self> {
        self.lu()?.solve(b)
    }

    /// Solve X * self = B, i.e. X = B * self^{-1}.
    pub fn solve_right(&self, b: &Self) -> Result<Self> {
        // X A = B  <=>  A^T X^T = B^T
        Ok(self.transpose().solve(&b.transpose())?.transpose())
    }

    pub fn determinant(&self) -> Result<Complex64> {
        let lu = self.lu();
        match lu {
            Ok(lu) => Ok(lu.det()),
            Err(Error::SingularFactorization) => Ok(Complex64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Pivoted LU factors of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: ComplexMatrix,
    perm: Vec<usize>,
    sign: Complex64,
}

impl Lu {
    /// min |u_ii| / max |u_ii|: a cheap conditioning proxy that, unlike
    /// singular values recovered from A^* A, detects exact rank
    /// deficiency down to rounding level.
    pub fn pivot_ratio(&self) -> f64 {
        let n = self.factors.rows();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let p = self.factors[(i, i)].norm();
            lo = lo.min(p);
            hi = hi.max(p);
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.factors.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {}",
                b.rows(),
                n
            )));
        }
        let m = b.cols();
        let mut x = ComplexMatrix::zeros(n, m);
        for r in 0..n {
            for c in 0..m {
                x[(r, c)] = b[(self.perm[r], c)];
            }
        }
        // forward substitution with unit lower factor
        for k in 0..n {
            for r in k + 1..n {
                let l = self.factors[(r, k)];
                for c in 0..m {
                    let sub = l * x[(k, c)];
                    x[(r, c)] -= sub;
                }
            }
        }
        // back substitution with upper factor
        for k in (0..n).rev() {
            let pivot = self.factors[(k, k)];
            for c in 0..m {
                x[(k, c)] /= pivot;
            }
            for r in 0..k {
                let u = self.factors[(r, k)];
                for c in 0..m {
                    let sub = u * x[(k, c)];
                    x[(r, c)] -= sub;
                }
            }
        }
        Ok(x)
    }

    pub fn det(&self) -> Complex64 {
        let n = self.factors.rows();
        let mut d = self.sign;
        for i in 0..n {
            d *= self.factors[(i, i)];
        }
        d
    }
}
