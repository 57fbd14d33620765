//! GF(2^w) arithmetic by log/antilog tables, `2 <= w <= 24`.

use crate::error::{invalid, Result};

/// Primitive polynomials over GF(2), indexed by degree, as coefficient masks
/// including the leading term. Table version 1; entries must never change
/// because syndrome messages are only comparable under the same modulus.
pub const PRIMITIVE_POLYS: [(u32, u32); 23] = [
    (2, 0x7),
    (3, 0xB),
    (4, 0x13),
    (5, 0x25),
    (6, 0x43),
    (7, 0x83),
    (8, 0x11D),
    (9, 0x211),
    (10, 0x409),
    (11, 0x805),
    (12, 0x1053),
    (13, 0x201B),
    (14, 0x4443),
    (15, 0x8003),
    (16, 0x1100B),
    (17, 0x20009),
    (18, 0x40081),
    (19, 0x80027),
    (20, 0x100009),
    (21, 0x200005),
    (22, 0x400003),
    (23, 0x800021),
    (24, 0x1000087),
];

pub const PRIMITIVE_POLYS_VERSION: u32 = 1;

pub const MAX_UNIVERSE: usize = (1 << 24) - 1;

/// Field tables plus the universe size `m` of code positions `0..m`.
#[derive(Debug, Clone)]
pub struct FieldContext {
    w: u32,
    modulus: u32,
    universe: usize,
    /// `exp[i] = g^i` for `0 <= i < 2 * order`, so products need no reduction.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

/// Smallest `w >= 2` with `2^w - 1 >= m`.
pub fn degree_for(m: usize) -> u32 {
    let mut w = 2;
    while (1usize << w) - 1 < m {
        w += 1;
    }
    w
}

impl FieldContext {
    /// `build_context`.
    pub fn new(m: usize) -> Result<Self> {
        if !(2..=MAX_UNIVERSE).contains(&m) {
            return Err(invalid(format!("universe size {m} outside 2..={MAX_UNIVERSE}")));
        }
        let w = degree_for(m);
        let mut ctx = Self::with_degree(w)?;
        ctx.universe = m;
        Ok(ctx)
    }

    /// Tables for GF(2^w) with the universe set to the full code length.
    pub fn with_degree(w: u32) -> Result<Self> {
        let modulus = PRIMITIVE_POLYS
            .iter()
            .find(|(deg, _)| *deg == w)
            .map(|&(_, poly)| poly)
            .ok_or_else(|| invalid(format!("no primitive polynomial for degree {w}")))?;
        let order = (1usize << w) - 1;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; order + 1];
        let mut v = 1u32;
        for (i, slot) in exp[..order].iter_mut().enumerate() {
            // Revisiting 1 early means g has order below 2^w - 1.
            if i > 0 && v == 1 {
                return Err(invalid(format!("modulus {modulus:#x} is not primitive")));
            }
            *slot = v;
            log[v as usize] = i as u32;
            v <<= 1;
            if v >> w & 1 == 1 {
                v ^= modulus;
            }
        }
        if v != 1 {
            return Err(invalid(format!("modulus {modulus:#x} is not primitive")));
        }
        let (lo, hi) = exp.split_at_mut(order);
        hi.copy_from_slice(lo);
        Ok(FieldContext { w, modulus, universe: order, exp, log })
    }

    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Multiplicative group order `2^w - 1`.
    pub fn order(&self) -> usize {
        (1usize << self.w) - 1
    }

    /// `g^e` for any exponent.
    #[inline]
    pub fn pow_g(&self, e: u64) -> u32 {
        self.exp[(e % self.order() as u64) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        assert!(b != 0, "division by zero in GF(2^{})", self.w);
        if a == 0 {
            return 0;
        }
        let order = self.order() as u32;
        self.exp[(self.log[a as usize] + order - self.log[b as usize]) as usize]
    }

    #[inline]
    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0 && (a as usize) <= self.order()).then(|| self.log[a as usize])
    }

    /// Carry-less product reduced by the modulus; independent of the tables.
    pub fn mul_clmul(&self, a: u32, b: u32) -> u32 {
        let mut acc = 0u64;
        for i in 0..self.w {
            if b >> i & 1 == 1 {
                acc ^= (a as u64) << i;
            }
        }
        for bit in (self.w..2 * self.w).rev() {
            if acc >> bit & 1 == 1 {
                acc ^= (self.modulus as u64) << (bit - self.w);
            }
        }
        acc as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_choice() {
        assert_eq!(degree_for(16), 5);
        assert_eq!(degree_for(64), 7);
        assert_eq!(degree_for(3), 2);
        assert_eq!(degree_for(4), 3);
        assert_eq!(degree_for(65_536), 17);
        assert_eq!(FieldContext::new(16).unwrap().w(), 5);
        assert!(FieldContext::new(1).is_err());
        assert!(FieldContext::new(MAX_UNIVERSE + 1).is_err());
    }

    #[test]
    fn every_tabled_polynomial_is_primitive() {
        for (w, _) in PRIMITIVE_POLYS {
            let ctx = FieldContext::with_degree(w).unwrap();
            let order = ctx.order();
            assert_eq!(ctx.pow_g(order as u64), 1);
            // g^(order/p) != 1 for each prime p | order.
            for p in prime_factors(order) {
                assert_ne!(ctx.pow_g((order / p) as u64), 1, "w={w}");
            }
        }
    }

    fn prime_factors(mut n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                out.push(p);
                while n.is_multiple_of(p) {
                    n /= p;
                }
            }
            p += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    #[test]
    fn tables_agree_with_carryless_multiply() {
        for w in [2, 5, 7, 8, 11, 13, 17] {
            let ctx = FieldContext::with_degree(w).unwrap();
            let size = 1u32 << w;
            let step = (size / 97).max(1);
            for a in (0..size).step_by(step as usize) {
                for b in (0..size).step_by(step as usize + 3) {
                    assert_eq!(ctx.mul(a, b), ctx.mul_clmul(a, b), "w={w} {a}*{b}");
                }
                if a != 0 {
                    assert_eq!(ctx.mul(ctx.div(1, a), a), 1);
                    assert_eq!(ctx.exp[ctx.log(a).unwrap() as usize], a);
                }
            }
        }
    }

    #[test]
    fn log_and_exp_are_inverse() {
        let ctx = FieldContext::with_degree(10).unwrap();
        for i in 0..ctx.order() as u32 {
            assert_eq!(ctx.log(ctx.pow_g(i as u64)), Some(i));
        }
        assert_eq!(ctx.log(0), None);
    }
}
