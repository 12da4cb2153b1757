//! Mutually orthogonal pilot sequences taken from a Sylvester–Hadamard matrix.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PilotError {
    #[error("pilot length {0} is not a power of two")]
    Length(usize),
    #[error("{count} orthogonal pilots requested but length {n_p} supports at most {n_p}")]
    TooMany { count: usize, n_p: usize },
    #[error("at least one pilot is required")]
    Empty,
}

/// `count` ±1 sequences of length `n_p` with `p_i · p_j = n_p · δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSet<T> {
    n_p: usize,
    sequences: Vec<Vec<T>>,
}

impl<T: Real> PilotSet<T> {
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn pilot_length(&self) -> usize {
        self.n_p
    }

    pub fn sequence(&self, j: usize) -> &[T] {
        &self.sequences[j]
    }

    pub fn complex_sequence(&self, j: usize) -> Vec<Complex<T>> {
        self.sequences[j]
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect()
    }

    /// Squared norm of each sequence (all equal to `n_p`).
    pub fn energy(&self) -> T {
        T::from_usize(self.n_p)
    }
}

/// Integer Sylvester–Hadamard matrix of order `n` (a power of two).
pub fn hadamard(n: usize) -> Vec<Vec<i8>> {
    let mut h = vec![vec![1i8]];
    while h.len() < n {
        let m = h.len();
        let mut next = vec![vec![0i8; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

/// First `count` rows of the order-`n_p` Hadamard matrix.
pub fn pilot_set<T: Real>(n_p: usize, count: usize) -> Result<PilotSet<T>, PilotError> {
    if n_p == 0 || !n_p.is_power_of_two() {
        return Err(PilotError::Length(n_p));
    }
    if count == 0 {
        return Err(PilotError::Empty);
    }
    if count > n_p {
        return Err(PilotError::TooMany { count, n_p });
    }
    let sequences = hadamard(n_p)
        .into_iter()
        .take(count)
        .map(|row| row.into_iter().map(|v| T::from_f64(v as f64)).collect())
        .collect();
    Ok(PilotSet { n_p, sequences })
}
