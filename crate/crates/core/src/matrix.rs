//! Dense complex matrix stored as separate real and imaginary planes.
//!
//! The split layout lets the inner loops of slot synthesis, combining and
//! cancellation vectorize without shuffles.

use num_complex::Complex;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            re: vec![T::zero(); rows * cols],
            im: vec![T::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_rows(rows: usize, cols: usize, entries: &[Complex<T>]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            re: entries.iter().map(|c| c.re).collect(),
            im: entries.iter().map(|c| c.im).collect(),
        }
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
    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        let i = r * self.cols + c;
        Complex::new(self.re[i], self.im[i])
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        let i = r * self.cols + c;
        self.re[i] = v.re;
        self.im[i] = v.im;
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[T], &[T]) {
        let s = r * self.cols;
        (&self.re[s..s + self.cols], &self.im[s..s + self.cols])
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> (&mut [T], &mut [T]) {
        let s = r * self.cols;
        (
            &mut self.re[s..s + self.cols],
            &mut self.im[s..s + self.cols],
        )
    }

    pub fn row_vec(&self, r: usize) -> Vec<Complex<T>> {
        let (re, im) = self.row(r);
        re.iter().zip(im).map(|(&a, &b)| Complex::new(a, b)).collect()
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.re
            .iter()
            .zip(&self.im)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * a + b * b)
    }

    /// Elementwise `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            re: self.re.iter().zip(&other.re).map(|(&a, &b)| a - b).collect(),
            im: self.im.iter().zip(&other.im).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Elementwise `self + other`.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            re: self.re.iter().zip(&other.re).map(|(&a, &b)| a + b).collect(),
            im: self.im.iter().zip(&other.im).map(|(&a, &b)| a + b).collect(),
        }
    }
}

/// `dst += a * src` on split-plane vectors.
#[inline]
pub fn axpy<T: Real>(dst_re: &mut [T], dst_im: &mut [T], a: Complex<T>, src_re: &[T], src_im: &[T]) {
    let n = dst_re.len();
    let (dst_im, src_re, src_im) = (&mut dst_im[..n], &src_re[..n], &src_im[..n]);
    for i in 0..n {
        let (sr, si) = (src_re[i], src_im[i]);
        dst_re[i] += a.re * sr - a.im * si;
        dst_im[i] += a.re * si + a.im * sr;
    }
}

/// `Σ x[i] · conj(y[i])` on split-plane vectors.
#[inline]
pub fn dot_conj<T: Real>(x_re: &[T], x_im: &[T], y_re: &[T], y_im: &[T]) -> Complex<T> {
    const LANES: usize = 16;
    let n = x_re.len();
    let (x_im, y_re, y_im) = (&x_im[..n], &y_re[..n], &y_im[..n]);
    // independent partial sums so the loop vectorizes
    let mut re = [T::zero(); LANES];
    let mut im = [T::zero(); LANES];
    let body = n - n % LANES;
    for c in (0..body).step_by(LANES) {
        for l in 0..LANES {
            let i = c + l;
            re[l] += x_re[i] * y_re[i] + x_im[i] * y_im[i];
            im[l] += x_im[i] * y_re[i] - x_re[i] * y_im[i];
        }
    }
    for i in body..n {
        re[0] += x_re[i] * y_re[i] + x_im[i] * y_im[i];
        im[0] += x_im[i] * y_re[i] - x_re[i] * y_im[i];
    }
    Complex::new(re.iter().copied().sum(), im.iter().copied().sum())
}

/// Splits a complex slice into real and imaginary planes.
pub fn split<T: Real>(v: &[Complex<T>]) -> (Vec<T>, Vec<T>) {
    (v.iter().map(|c| c.re).collect(), v.iter().map(|c| c.im).collect())
}
