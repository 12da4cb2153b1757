//! Bit- and symbol-level physical layer: BCH(511, 421) over GF(2⁹), QPSK and pilots.

pub mod bch;
pub mod gf512;
pub mod pilots;
pub mod qpsk;

pub use bch::{BchCodec, Codeword, DecodeFailure, Decoded, MessageBits};
pub use pilots::{pilot_set, PilotSet};
pub use qpsk::{demap_codeword, qpsk_demap, qpsk_map, SymbolBlock};
