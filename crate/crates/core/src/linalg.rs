//! Dense real and complex matrices, row-major.
//!
//! Products go through `matrixmultiply::zgemm`; the Hermitian Cholesky
//! factorization and triangular inverse are written out here.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("data length != rows * cols"));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols.max(1))) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `out = self^T * y`.
    pub fn tr_mul_vec_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&yi, row) in y.iter().zip(self.data.chunks_exact(self.cols.max(1))) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
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
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch("data length != rows * cols"));
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|z| *z *= s);
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A^H|` entry-wise.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Adds `s` to every diagonal entry.
    pub fn shift_diag(&mut self, s: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += s;
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `a * b`.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.cols, b.rows, "matmul inner dimension");
    let mut c = CMatrix::zeros(a.rows, b.cols);
    if a.rows == 0 || b.cols == 0 || a.cols == 0 {
        return c;
    }
    // SAFETY: Complex<f64> is #[repr(C)] { re, im }, layout-identical to
    // [f64; 2]. Pointers and strides describe the three owned row-major
    // buffers, whose shapes were checked above.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            a.rows,
            a.cols,
            b.cols,
            [1.0, 0.0],
            a.data.as_ptr() as *const [f64; 2],
            a.cols as isize,
            1,
            b.data.as_ptr() as *const [f64; 2],
            b.cols as isize,
            1,
            [0.0, 0.0],
            c.data.as_mut_ptr() as *mut [f64; 2],
            c.cols as isize,
            1,
        );
    }
    c
}

/// `a * a^H`, Hermitian by construction (the lower triangle is mirrored).
pub fn gram(a: &CMatrix) -> CMatrix {
    let mut g = matmul(a, &a.adjoint());
    for i in 0..g.rows {
        g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
        for j in 0..i {
            g[(j, i)] = g[(i, j)].conj();
        }
    }
    g
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Reads the lower triangle only.
    pub fn factor(a: &CMatrix) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::DimensionMismatch("Cholesky needs a square matrix"));
        }
        let n = a.rows;
        let mut l = CMatrix::zeros(n, n);
        let mut row_j = Vec::with_capacity(n);
        for j in 0..n {
            row_j.clear();
            row_j.extend_from_slice(&l.data[j * n..j * n + j]);
            let d = a[(j, j)].re - row_j.iter().map(|z| z.norm_sqr()).sum::<f64>();
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            let djj = libm::sqrt(d);
            l.data[j * n + j] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let row_i = &l.data[i * n..i * n + j];
                let mut s = a[(i, j)];
                for (x, y) in row_i.iter().zip(&row_j) {
                    s -= x * y.conj();
                }
                l.data[i * n + j] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn l(&self) -> &CMatrix {
        &self.l
    }

    /// `(max L_ii / min L_ii)^2`, a cheap lower bound on the 2-norm
    /// condition number of the factored matrix.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.l.rows;
        if n == 0 {
            return 1.0;
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let d = self.l[(i, i)].re;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let r = hi / lo;
        r * r
    }

    /// `L^{-1}`, lower triangular.
    pub fn l_inverse(&self) -> CMatrix {
        let n = self.l.rows;
        let l = &self.l;
        // columns of L^{-1} are independent forward solves; work on the
        // transpose so each solve writes a contiguous row
        let mut xt = CMatrix::zeros(n, n);
        for j in 0..n {
            let x = &mut xt.data[j * n..(j + 1) * n];
            x[j] = Complex64::new(1.0, 0.0) / l[(j, j)];
            for i in j + 1..n {
                let row = &l.data[i * n..i * n + i];
                let mut s = Complex64::new(0.0, 0.0);
                for k in j..i {
                    s += row[k] * x[k];
                }
                x[i] = -s / l[(i, i)];
            }
        }
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = xt.data[j * n + i];
            }
        }
        out
    }

    /// `A^{-1} = L^{-H} L^{-1}`, Hermitian.
    pub fn inverse(&self) -> CMatrix {
        let li = self.l_inverse();
        let mut inv = matmul(&li.adjoint(), &li);
        let n = inv.rows;
        for i in 0..n {
            inv[(i, i)] = Complex64::new(inv[(i, i)].re, 0.0);
            for j in 0..i {
                inv[(j, i)] = inv[(i, j)].conj();
            }
        }
        inv
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.rows;
        assert_eq!(b.len(), n);
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::draw_small_scale;
    use crate::rng;

    fn naive_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
        CMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
        })
    }

    #[test]
    fn zgemm_matches_naive() {
        let mut r = rng::stream(1, &[]);
        let a = draw_small_scale(7, 13, &mut r);
        let b = draw_small_scale(13, 5, &mut r);
        assert!(matmul(&a, &b).max_abs_diff(&naive_mul(&a, &b)) < 1e-12);
    }

    #[test]
    fn cholesky_inverse_roundtrip() {
        let mut r = rng::stream(2, &[]);
        let g = draw_small_scale(20, 30, &mut r);
        let mut a = gram(&g);
        a.shift_diag(0.5);
        let ch = Cholesky::factor(&a).unwrap();
        let llh = matmul(ch.l(), &ch.l().adjoint());
        assert!(llh.max_abs_diff(&a) < 1e-10);
        let inv = ch.inverse();
        assert!(matmul(&a, &inv).max_abs_diff(&CMatrix::identity(20)) < 1e-10);
        let b: Vec<Complex64> = g.column(0);
        let x = ch.solve_vec(&b);
        let ax: Vec<Complex64> = (0..20).map(|i| (0..20).map(|k| a[(i, k)] * x[k]).sum()).collect();
        for (u, v) in ax.iter().zip(&b) {
            assert!((u - v).norm() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = CMatrix::identity(3);
        a[(2, 2)] = Complex64::new(-1.0, 0.0);
        assert!(Cholesky::factor(&a).is_err());
    }

    #[test]
    fn real_matvec() {
        let m = RMatrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64);
        let mut out = [0.0; 2];
        m.mul_vec_into(&[1.0, 1.0, 1.0], &mut out);
        assert_eq!(out, [3.0, 12.0]);
        let mut out = [0.0; 3];
        m.tr_mul_vec_into(&[1.0, 2.0], &mut out);
        assert_eq!(out, [6.0, 9.0, 12.0]);
    }
}
