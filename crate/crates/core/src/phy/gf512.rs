//! Arithmetic in GF(2⁹) generated by the primitive polynomial x⁹ + x⁴ + 1.

/// Field size minus one; the multiplicative group order.
pub const ORDER: usize = 511;

const PRIMITIVE: u16 = 0x211;

#[derive(Clone)]
pub struct Gf512 {
    exp: [u16; 2 * ORDER + 2],
    log: [u16; ORDER + 1],
}

impl std::fmt::Debug for Gf512 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Gf512")
    }
}

impl Default for Gf512 {
    fn default() -> Self {
        Self::new()
    }
}

impl Gf512 {
    pub fn new() -> Self {
        let mut exp = [0u16; 2 * ORDER + 2];
        let mut log = [0u16; ORDER + 1];
        let mut v: u16 = 1;
        for i in 0..ORDER {
            exp[i] = v;
            log[v as usize] = i as u16;
            v <<= 1;
            if v & 0x200 != 0 {
                v ^= PRIMITIVE;
            }
        }
        debug_assert_eq!(v, 1, "x^9 + x^4 + 1 must be primitive");
        for i in ORDER..exp.len() {
            exp[i] = exp[i - ORDER];
        }
        Self { exp, log }
    }

    /// α^i for any non-negative exponent.
    #[inline]
    pub fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % ORDER]
    }

    /// Discrete log; undefined for zero.
    #[inline]
    pub fn log(&self, a: u16) -> usize {
        debug_assert!(a != 0);
        self.log[a as usize] as usize
    }

    /// `α^e` for `e < 2·ORDER`, avoiding a reduction modulo the group order.
    #[inline]
    pub fn exp_sum(&self, e: usize) -> u16 {
        self.exp[e]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn div(&self, a: u16, b: u16) -> u16 {
        assert!(b != 0, "division by zero in GF(512)");
        if a == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + ORDER - self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        self.div(1, a)
    }

    #[inline]
    pub fn square(&self, a: u16) -> u16 {
        self.mul(a, a)
    }

    /// Multiplies `a` by α^k (`k` taken modulo the group order).
    #[inline]
    pub fn mul_alpha_pow(&self, a: u16, k: usize) -> u16 {
        if a == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] as usize + k % ORDER) % ORDER]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_on_all_elements() {
        let gf = Gf512::new();
        for a in 1..512u16 {
            assert_eq!(gf.mul(a, gf.inv(a)), 1);
            assert_eq!(gf.mul(a, 1), a);
            assert_eq!(gf.mul(a, 0), 0);
        }
        assert_eq!(gf.alpha_pow(ORDER), 1);
        // α^9 = α^4 + 1
        assert_eq!(gf.alpha_pow(9), 0b1_0001);
    }

    #[test]
    fn distributive_spot_checks() {
        let gf = Gf512::new();
        for a in (1..512u16).step_by(37) {
            for b in (0..512u16).step_by(41) {
                for c in (0..512u16).step_by(53) {
                    assert_eq!(gf.mul(a, b ^ c), gf.mul(a, b) ^ gf.mul(a, c));
                }
            }
        }
    }
}
