//! Narrow-sense binary BCH(511, 421) code with designed distance 21 (t = 10).
//!
//! Codewords are systematic: parity occupies polynomial positions 0..90, the
//! message positions 90..511. A 512th null bit pads the word to an even
//! length for QPSK mapping.
//!
//! Decoding is bounded-distance: table-driven remainder and syndromes,
//! Berlekamp–Massey for the error locator, a splitting test
//! (`x^512 ≡ x mod Λ`) that rejects locators without a full set of distinct
//! field roots, then Chien search to place the errors.

use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

use super::gf512::{Gf512, ORDER};

pub const CODE_LENGTH: usize = 511;
pub const MESSAGE_LENGTH: usize = 421;
pub const PARITY_LENGTH: usize = CODE_LENGTH - MESSAGE_LENGTH;
pub const CORRECTABLE: usize = 10;
/// Codeword length including the appended null bit.
pub const WORD_LENGTH: usize = 512;

const MSG_WORDS: usize = 7;
const WORDS: usize = 8;
const PARITY_MASK: u128 = (1u128 << PARITY_LENGTH) - 1;
const LOW_MASK: u128 = (1u128 << (PARITY_LENGTH - 8)) - 1;
const N_ODD_SYNDROMES: usize = CORRECTABLE;
const REM_BYTES: usize = PARITY_LENGTH.div_ceil(8);

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum BitsError {
    #[error("expected {expected} bits, got {got}")]
    Length { expected: usize, got: usize },
}

/// The cluster could not be decoded; not an exceptional condition.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("BCH decoding failure")]
pub struct DecodeFailure;

/// A 421-bit information message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MessageBits([u64; MSG_WORDS]);

impl MessageBits {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut w = [0u64; MSG_WORDS];
        for x in w.iter_mut() {
            *x = rng.random();
        }
        w[MSG_WORDS - 1] &= (1u64 << (MESSAGE_LENGTH - 64 * (MSG_WORDS - 1))) - 1;
        Self(w)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, BitsError> {
        if bits.len() != MESSAGE_LENGTH {
            return Err(BitsError::Length {
                expected: MESSAGE_LENGTH,
                got: bits.len(),
            });
        }
        let mut w = [0u64; MSG_WORDS];
        for (i, &b) in bits.iter().enumerate() {
            w[i / 64] |= (b as u64) << (i % 64);
        }
        Ok(Self(w))
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        assert!(i < MESSAGE_LENGTH);
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..MESSAGE_LENGTH).map(|i| self.bit(i)).collect()
    }

    pub fn words(&self) -> &[u64; MSG_WORDS] {
        &self.0
    }

    pub fn count_ones(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

impl std::ops::BitXor for MessageBits {
    type Output = Self;
    fn bitxor(self, rhs: Self) -> Self {
        let mut w = self.0;
        for (a, b) in w.iter_mut().zip(rhs.0) {
            *a ^= b;
        }
        Self(w)
    }
}

/// 512 hard bits: a BCH codeword (positions 0..511) plus the null bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Codeword([u64; WORDS]);

impl Codeword {
    pub fn from_words(words: [u64; WORDS]) -> Self {
        Self(words)
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, BitsError> {
        if bits.len() != WORD_LENGTH {
            return Err(BitsError::Length {
                expected: WORD_LENGTH,
                got: bits.len(),
            });
        }
        let mut w = [0u64; WORDS];
        for (i, &b) in bits.iter().enumerate() {
            w[i / 64] |= (b as u64) << (i % 64);
        }
        Ok(Self(w))
    }

    #[inline]
    pub fn words(&self) -> &[u64; WORDS] {
        &self.0
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..WORD_LENGTH).map(|i| self.bit(i)).collect()
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    pub fn distance(&self, other: &Self) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }
}

/// Successful decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoded {
    pub message: MessageBits,
    pub corrected: usize,
}

/// Encoder/decoder with its lookup tables. Build once and share.
pub struct BchCodec {
    gf: Gf512,
    /// Generator polynomial, bit i = coefficient of x^i (degree 90).
    generator: u128,
    /// `(h(x) · x^90) mod g(x)` for every byte `h`.
    reduce: [u128; 256],
    /// Odd syndromes S_1, S_3, …, S_19 contributed by each remainder byte.
    syndrome: Box<[[[u16; 256]; REM_BYTES]; N_ODD_SYNDROMES]>,
}

impl std::fmt::Debug for BchCodec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BchCodec")
            .field("generator", &format_args!("{:#x}", self.generator))
            .finish()
    }
}

impl Default for BchCodec {
    fn default() -> Self {
        Self::new()
    }
}

impl BchCodec {
    pub fn new() -> Self {
        let gf = Gf512::new();
        let generator = generator_polynomial(&gf);

        let mut reduce = [0u128; 256];
        for (h, slot) in reduce.iter_mut().enumerate() {
            // bit-serial (h · x^90) mod g
            let mut r: u128 = 0;
            for j in (0..8).rev() {
                let top = (r >> (PARITY_LENGTH - 1)) & 1 == 1;
                r = (r << 1) & PARITY_MASK;
                if top {
                    r ^= generator & PARITY_MASK;
                }
                if (h >> j) & 1 == 1 {
                    r ^= generator & PARITY_MASK;
                }
            }
            *slot = r;
        }

        let mut syndrome = Box::new([[[0u16; 256]; REM_BYTES]; N_ODD_SYNDROMES]);
        for (s, table) in syndrome.iter_mut().enumerate() {
            let i = 2 * s + 1;
            for (b, row) in table.iter_mut().enumerate() {
                for (byte, out) in row.iter_mut().enumerate() {
                    let mut acc = 0u16;
                    for j in 0..8 {
                        let pos = 8 * b + j;
                        if (byte >> j) & 1 == 1 && pos < PARITY_LENGTH {
                            acc ^= gf.alpha_pow(i * pos);
                        }
                    }
                    *out = acc;
                }
            }
        }

        Self {
            gf,
            generator,
            reduce,
            syndrome,
        }
    }

    /// Process-wide codec instance.
    pub fn shared() -> &'static BchCodec {
        static CODEC: OnceLock<BchCodec> = OnceLock::new();
        CODEC.get_or_init(BchCodec::new)
    }

    pub fn generator(&self) -> u128 {
        self.generator
    }

    pub fn field(&self) -> &Gf512 {
        &self.gf
    }

    /// `w(x) mod g(x)` for the polynomial held in positions 0..512.
    fn remainder(&self, w: &[u64; WORDS]) -> u128 {
        let mut r: u128 = 0;
        for byte_idx in (0..WORDS * 8).rev() {
            let byte = (w[byte_idx / 8] >> (8 * (byte_idx % 8))) & 0xff;
            let high = (r >> (PARITY_LENGTH - 8)) as usize;
            r = ((r & LOW_MASK) << 8) ^ byte as u128 ^ self.reduce[high];
        }
        r
    }

    pub fn is_codeword(&self, word: &Codeword) -> bool {
        let mut w = word.0;
        w[WORDS - 1] &= !(1u64 << 63);
        self.remainder(&w) == 0
    }

    pub fn encode(&self, msg: &MessageBits) -> Codeword {
        // shift message into positions 90..511
        let mut w = [0u64; WORDS];
        let (q, s) = (PARITY_LENGTH / 64, PARITY_LENGTH % 64);
        for (i, &m) in msg.0.iter().enumerate() {
            w[i + q] |= m << s;
            if s != 0 && i + q + 1 < WORDS {
                w[i + q + 1] |= m >> (64 - s);
            }
        }
        let parity = self.remainder(&w);
        w[0] |= parity as u64;
        w[1] |= (parity >> 64) as u64;
        Codeword(w)
    }

    /// Syndromes S_1..S_20 of the received polynomial.
    fn syndromes(&self, rem: u128) -> [u16; 2 * CORRECTABLE] {
        let mut odd = [0u16; N_ODD_SYNDROMES];
        for (s, out) in odd.iter_mut().enumerate() {
            let table = &self.syndrome[s];
            let mut acc = 0u16;
            for (b, row) in table.iter().enumerate() {
                acc ^= row[((rem >> (8 * b)) & 0xff) as usize];
            }
            *out = acc;
        }
        let mut all = [0u16; 2 * CORRECTABLE];
        for i in 1..=2 * CORRECTABLE {
            all[i - 1] = if i % 2 == 1 {
                odd[i / 2]
            } else {
                self.gf.square(all[i / 2 - 1])
            };
        }
        all
    }

    /// Hard-decision bounded-distance decode. The null bit is ignored.
    pub fn decode(&self, word: &Codeword) -> Result<Decoded, DecodeFailure> {
        let mut w = word.0;
        w[WORDS - 1] &= !(1u64 << 63);
        let rem = self.remainder(&w);
        if rem == 0 {
            return Ok(Decoded {
                message: extract_message(&w),
                corrected: 0,
            });
        }
        let synd = self.syndromes(rem);
        let (lambda, degree) = self.berlekamp_massey(&synd);
        if degree == 0 || degree > CORRECTABLE || lambda[degree] == 0 {
            return Err(DecodeFailure);
        }
        if !self.splits_over_field(&lambda, degree) {
            return Err(DecodeFailure);
        }
        let positions = self.chien(&lambda, degree);
        if positions.len() != degree {
            return Err(DecodeFailure);
        }
        for &p in &positions {
            w[p / 64] ^= 1u64 << (p % 64);
        }
        debug_assert_eq!(self.remainder(&w), 0);
        Ok(Decoded {
            message: extract_message(&w),
            corrected: degree,
        })
    }

    fn berlekamp_massey(&self, s: &[u16; 2 * CORRECTABLE]) -> ([u16; 2 * CORRECTABLE + 1], usize) {
        let gf = &self.gf;
        let mut c = [0u16; 2 * CORRECTABLE + 1];
        let mut b = [0u16; 2 * CORRECTABLE + 1];
        c[0] = 1;
        b[0] = 1;
        let mut l = 0usize;
        let mut m = 1usize;
        let mut bd = 1u16;
        for n in 0..2 * CORRECTABLE {
            let mut d = s[n];
            for i in 1..=l {
                d ^= gf.mul(c[i], s[n - i]);
            }
            if d == 0 {
                m += 1;
                continue;
            }
            let coef = gf.div(d, bd);
            if 2 * l <= n {
                let t = c;
                for i in 0..=2 * CORRECTABLE - m {
                    c[i + m] ^= gf.mul(coef, b[i]);
                }
                l = n + 1 - l;
                b = t;
                bd = d;
                m = 1;
            } else {
                for i in 0..=2 * CORRECTABLE - m {
                    c[i + m] ^= gf.mul(coef, b[i]);
                }
                m += 1;
            }
        }
        (c, l)
    }

    /// True iff `Λ` (degree `deg`, Λ(0) = 1) has `deg` distinct roots in GF(512),
    /// i.e. `x^512 ≡ x (mod Λ)`.
    fn splits_over_field(&self, lambda: &[u16], deg: usize) -> bool {
        let gf = &self.gf;
        let lead_inv = gf.inv(lambda[deg]);
        // logs of the monic modulus coefficients m_0..m_{deg-1}; None for zeros
        let mut modulus = [None; CORRECTABLE];
        for i in 0..deg {
            let m = gf.mul(lambda[i], lead_inv);
            modulus[i] = (m != 0).then(|| gf.log(m));
        }
        let reduce = |poly: &mut [u16; 2 * CORRECTABLE], top: usize| {
            for d in (deg..=top).rev() {
                let c = poly[d];
                if c != 0 {
                    poly[d] = 0;
                    let lc = gf.log(c);
                    for (i, m) in modulus[..deg].iter().enumerate() {
                        if let Some(lm) = m {
                            poly[d - deg + i] ^= gf.exp_sum(lc + lm);
                        }
                    }
                }
            }
        };
        let mut x = [0u16; 2 * CORRECTABLE];
        x[1] = 1;
        if deg == 1 {
            reduce(&mut x, 1);
        }
        let x_reduced = x;
        let mut cur = x;
        for _ in 0..9 {
            let mut sq = [0u16; 2 * CORRECTABLE];
            for i in 0..deg {
                sq[2 * i] = gf.square(cur[i]);
            }
            reduce(&mut sq, 2 * (deg - 1));
            cur = sq;
        }
        cur[..deg] == x_reduced[..deg]
    }

    fn chien(&self, lambda: &[u16], deg: usize) -> Vec<usize> {
        let gf = &self.gf;
        let mut out = Vec::with_capacity(deg);
        // term_i tracks λ_i · α^{-p·i}
        let mut terms = [0u16; CORRECTABLE + 1];
        terms[..=deg].copy_from_slice(&lambda[..=deg]);
        for p in 0..ORDER {
            let mut sum = 0u16;
            for &t in &terms[..=deg] {
                sum ^= t;
            }
            if sum == 0 {
                out.push(p);
                if out.len() == deg {
                    break;
                }
            }
            for (i, t) in terms.iter_mut().enumerate().take(deg + 1).skip(1) {
                *t = gf.mul_alpha_pow(*t, ORDER - i);
            }
        }
        out
    }
}

fn extract_message(w: &[u64; WORDS]) -> MessageBits {
    let (q, s) = (PARITY_LENGTH / 64, PARITY_LENGTH % 64);
    let mut m = [0u64; MSG_WORDS];
    for (i, out) in m.iter_mut().enumerate() {
        let lo = w[i + q] >> s;
        let hi = if i + q + 1 < WORDS && s != 0 {
            w[i + q + 1] << (64 - s)
        } else {
            0
        };
        *out = lo | hi;
    }
    m[MSG_WORDS - 1] &= (1u64 << (MESSAGE_LENGTH - 64 * (MSG_WORDS - 1))) - 1;
    MessageBits(m)
}

/// Product of the distinct minimal polynomials of α, α³, …, α¹⁹.
fn generator_polynomial(gf: &Gf512) -> u128 {
    let mut seen = [false; ORDER];
    // polynomial with GF(512) coefficients, low degree first
    let mut g: Vec<u16> = vec![1];
    for i in (1..=2 * CORRECTABLE).step_by(2) {
        if seen[i] {
            continue;
        }
        let mut j = i;
        loop {
            seen[j] = true;
            // g *= (x + α^j)
            let root = gf.alpha_pow(j);
            let mut next = vec![0u16; g.len() + 1];
            for (k, &c) in g.iter().enumerate() {
                next[k + 1] ^= c;
                next[k] ^= gf.mul(c, root);
            }
            g = next;
            j = (2 * j) % ORDER;
            if j == i {
                break;
            }
        }
    }
    // even powers are conjugates of odd ones and are already roots
    assert_eq!(g.len() - 1, PARITY_LENGTH, "generator degree");
    g.iter().enumerate().fold(0u128, |acc, (k, &c)| {
        assert!(c <= 1, "generator must have binary coefficients");
        acc | ((c as u128) << k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn poly_eval(gf: &Gf512, bits: &[u64; WORDS], upto: usize, x_log: usize) -> u16 {
        let mut acc = 0;
        for p in 0..upto {
            if bits[p / 64] >> (p % 64) & 1 == 1 {
                acc ^= gf.alpha_pow(x_log * p);
            }
        }
        acc
    }

    #[test]
    fn generator_has_designed_roots() {
        let codec = BchCodec::new();
        let g = codec.generator();
        assert_eq!(127 - g.leading_zeros(), 90);
        let words = [g as u64, (g >> 64) as u64, 0, 0, 0, 0, 0, 0];
        for i in 1..=20 {
            assert_eq!(poly_eval(codec.field(), &words, 91, i), 0, "g(α^{i}) != 0");
        }
        assert_ne!(poly_eval(codec.field(), &words, 91, 21), 0);
    }

    #[test]
    fn zero_message_gives_zero_codeword() {
        let codec = BchCodec::new();
        assert_eq!(codec.encode(&MessageBits::zero()).weight(), 0);
    }

    #[test]
    fn encoding_is_linear_and_systematic() {
        let codec = BchCodec::new();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for _ in 0..50 {
            let a = MessageBits::random(&mut rng);
            let b = MessageBits::random(&mut rng);
            let (ca, cb, cab) = (codec.encode(&a), codec.encode(&b), codec.encode(&(a ^ b)));
            let mut x = [0u64; WORDS];
            for i in 0..WORDS {
                x[i] = ca.words()[i] ^ cb.words()[i];
            }
            assert_eq!(Codeword::from_words(x), cab);
            assert!(codec.is_codeword(&ca));
            assert!(!ca.bit(511));
            for i in 0..MESSAGE_LENGTH {
                assert_eq!(ca.bit(PARITY_LENGTH + i), a.bit(i));
            }
        }
    }

    #[test]
    fn syndromes_match_direct_evaluation() {
        let codec = BchCodec::new();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(11);
        let mut w = [0u64; WORDS];
        for x in w.iter_mut() {
            *x = rng.random();
        }
        w[7] &= !(1 << 63);
        let s = codec.syndromes(codec.remainder(&w));
        for i in 1..=20 {
            assert_eq!(s[i - 1], poly_eval(codec.field(), &w, 511, i));
        }
    }

    #[test]
    fn corrects_up_to_ten_errors() {
        let codec = BchCodec::new();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        for e in 0..=CORRECTABLE {
            for _ in 0..40 {
                let m = MessageBits::random(&mut rng);
                let mut c = codec.encode(&m);
                for p in sample(&mut rng, CODE_LENGTH, e) {
                    c.flip(p);
                }
                let d = codec.decode(&c).expect("within radius");
                assert_eq!(d.message, m);
                assert_eq!(d.corrected, e);
            }
        }
    }

    #[test]
    fn null_bit_is_ignored() {
        let codec = BchCodec::new();
        let m = MessageBits::random(&mut Xoshiro256PlusPlus::seed_from_u64(9));
        let mut c = codec.encode(&m);
        c.flip(511);
        assert_eq!(codec.decode(&c).unwrap().message, m);
    }

    #[test]
    fn all_ones_word_is_itself_a_codeword() {
        // x + 1 does not divide the generator, so the repetition word
        // (x^511 + 1)/(x + 1) is a codeword: 511 flips on the zero codeword are
        // indistinguishable from a clean all-ones transmission.
        let codec = BchCodec::new();
        let c = Codeword::from_words([u64::MAX; WORDS]);
        let mut ones = c;
        ones.flip(511);
        assert!(codec.is_codeword(&ones));
        let d = codec.decode(&c).unwrap();
        assert_eq!(d.corrected, 0);
        assert_eq!(d.message.count_ones() as usize, MESSAGE_LENGTH);
        // one bit short of all ones sits at distance 510 from zero and 1 from
        // all ones, so it decodes to all ones as well
        let mut near = c;
        near.flip(17);
        assert_eq!(codec.decode(&near).unwrap().message, d.message);
    }

    #[test]
    fn heavy_noise_never_decodes_beyond_radius() {
        let codec = BchCodec::new();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(31);
        for _ in 0..2000 {
            let mut w = [0u64; WORDS];
            for x in w.iter_mut() {
                *x = rng.random();
            }
            let c = Codeword::from_words(w);
            if let Ok(d) = codec.decode(&c) {
                let re = codec.encode(&d.message);
                assert!(re.distance(&c) - u32::from(c.bit(511)) <= CORRECTABLE as u32);
            }
        }
    }

    #[test]
    fn message_bits_round_trip() {
        let m = MessageBits::random(&mut Xoshiro256PlusPlus::seed_from_u64(2));
        assert_eq!(MessageBits::from_bits(&m.to_bits()).unwrap(), m);
        assert!(MessageBits::from_bits(&[true; 3]).is_err());
    }
}
