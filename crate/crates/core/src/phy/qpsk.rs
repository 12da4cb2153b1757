//! Gray-mapped QPSK.
//!
//! Bit pair `(b0, b1)` maps to `((1 - 2·b1) + j(1 - 2·b0)) / √2`, so
//! `00 → (+1+j)`, `01 → (−1+j)`, `11 → (−1−j)`, `10 → (+1−j)`. Demapping is a
//! sign decision per component; a component exactly on an axis decides
//! toward the positive sign.

use num_complex::Complex;
use thiserror::Error;

use super::bch::{Codeword, WORD_LENGTH};
use crate::matrix::dot_conj;
use crate::scalar::Real;

pub const SYMBOLS_PER_CODEWORD: usize = WORD_LENGTH / 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QpskError {
    #[error("bit count {0} is odd")]
    OddLength(usize),
}

#[inline]
fn point<T: Real>(b0: bool, b1: bool) -> Complex<T> {
    let a = T::FRAC_1_SQRT_2();
    Complex::new(if b1 { -a } else { a }, if b0 { -a } else { a })
}

pub fn qpsk_map<T: Real>(bits: &[bool]) -> Result<Vec<Complex<T>>, QpskError> {
    if bits.len() % 2 != 0 {
        return Err(QpskError::OddLength(bits.len()));
    }
    Ok(bits.chunks_exact(2).map(|p| point(p[0], p[1])).collect())
}

pub fn qpsk_demap<T: Real>(symbols: &[Complex<T>]) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|s| [s.im < T::zero(), s.re < T::zero()])
        .collect()
}

/// Hard decisions for one codeword's worth of split-plane symbols.
pub fn demap_codeword<T: Real>(re: &[T], im: &[T]) -> Codeword {
    assert_eq!(re.len(), SYMBOLS_PER_CODEWORD);
    assert_eq!(im.len(), SYMBOLS_PER_CODEWORD);
    let mut w = [0u64; WORD_LENGTH / 64];
    for (k, (&r, &i)) in re.iter().zip(im).enumerate() {
        let bits = ((i < T::zero()) as u64) | (((r < T::zero()) as u64) << 1);
        w[k / 32] |= bits << (2 * (k % 32));
    }
    Codeword::from_words(w)
}

/// A payload of unit-energy QPSK symbols in split-plane form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock<T> {
    pub re: Vec<T>,
    pub im: Vec<T>,
}

impl<T: Real> SymbolBlock<T> {
    pub fn from_codeword(c: &Codeword) -> Self {
        let a = T::FRAC_1_SQRT_2();
        let mut re = Vec::with_capacity(SYMBOLS_PER_CODEWORD);
        let mut im = Vec::with_capacity(SYMBOLS_PER_CODEWORD);
        for k in 0..SYMBOLS_PER_CODEWORD {
            let (b0, b1) = (c.bit(2 * k), c.bit(2 * k + 1));
            re.push(if b1 { -a } else { a });
            im.push(if b0 { -a } else { a });
        }
        Self { re, im }
    }

    pub fn from_symbols(symbols: &[Complex<T>]) -> Self {
        Self {
            re: symbols.iter().map(|s| s.re).collect(),
            im: symbols.iter().map(|s| s.im).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn get(&self, i: usize) -> Complex<T> {
        Complex::new(self.re[i], self.im[i])
    }

    pub fn energy(&self) -> T {
        dot_conj(&self.re, &self.im, &self.re, &self.im).re
    }

    /// `Σ self[i] · conj(other[i]) / len`.
    pub fn correlation(&self, other: &Self) -> Complex<T> {
        dot_conj(&self.re, &self.im, &other.re, &other.im) / T::from_usize(self.len())
    }
}
