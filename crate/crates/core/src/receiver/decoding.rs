//! Maximal ratio combining, hard-decision decoding and payload-aided
//! channel re-estimation.

use num_complex::Complex;

use super::detection::Cluster;
use super::ReceiverError;
use crate::matrix::{axpy, dot_conj, CMatrix};
use crate::phy::{demap_codeword, BchCodec, DecodeFailure, MessageBits, SymbolBlock};
use crate::scalar::Real;

/// `z = ĥ^H·Y / ‖ĥ‖²` over split-plane payload rows.
pub fn mrc_combine<T: Real>(
    estimates: &[Complex<T>],
    rows: &[(&[T], &[T])],
) -> Result<SymbolBlock<T>, ReceiverError> {
    assert_eq!(estimates.len(), rows.len());
    let norm: T = estimates.iter().map(|h| h.norm_sqr()).sum();
    if !(norm > T::zero()) {
        return Err(ReceiverError::ZeroEstimate);
    }
    let n_d = rows.first().map_or(0, |r| r.0.len());
    let mut re = vec![T::zero(); n_d];
    let mut im = vec![T::zero(); n_d];
    for (h, (y_re, y_im)) in estimates.iter().zip(rows) {
        axpy(&mut re, &mut im, h.conj() / norm, y_re, y_im);
    }
    Ok(SymbolBlock { re, im })
}

/// MRC over a cluster's own payload rows.
pub fn combine_cluster<T: Real>(
    cluster: &Cluster<T>,
    payload: &CMatrix<T>,
) -> Result<SymbolBlock<T>, ReceiverError> {
    let rows: Vec<(&[T], &[T])> = cluster.elements.clone().map(|r| payload.row(r)).collect();
    mrc_combine(&cluster.estimates, &rows)
}

/// Hard QPSK decisions followed by BCH decoding.
pub fn attempt_decode<T: Real>(z: &SymbolBlock<T>, codec: &BchCodec) -> Result<MessageBits, DecodeFailure> {
    let word = demap_codeword(&z.re, &z.im);
    codec.decode(&word).map(|d| d.message)
}

/// `h̃ = y·s^H / ‖s‖²`.
pub fn reestimate_channel_payload<T: Real>(y_re: &[T], y_im: &[T], s: &SymbolBlock<T>) -> Complex<T> {
    dot_conj(y_re, y_im, &s.re, &s.im) / s.energy()
}
