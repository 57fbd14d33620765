//! Exact inner protocol on an `m`-bit universe under the promise `|a xor b| <= 2d`.
//!
//! Each party sends the odd power sums `S_j(s) = sum_{i in supp(s)} g^{i j}`,
//! `j = 1, 3, ..., 4d - 1`, of a narrow-sense binary BCH code with designed
//! distance `4d + 1`, shortened to `m` positions. The referee XORs the two
//! messages into the syndromes of `e = a xor b`, restores the even ones by
//! squaring, runs Berlekamp-Massey, and confirms the locator by a Chien search
//! and a syndrome recomputation. Anything that does not verify is reported as a
//! failure, which the referee reads as `GT`.

use serde::{Deserialize, Serialize};

use crate::bits::{hamming_distance, BitString};
use crate::error::{violation, Result};
use crate::field::FieldContext;
use crate::instance::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeMessage {
    /// `S_1, S_3, ..., S_{4d-1}`.
    pub elems: Vec<u32>,
}

impl SyndromeMessage {
    pub fn bits(&self, ctx: &FieldContext) -> usize {
        self.elems.len() * ctx.w() as usize
    }

    fn check(&self, ctx: &FieldContext, d: usize) -> Result<()> {
        if self.elems.len() != 2 * d {
            return Err(violation(format!("syndrome message has {} elements, expected {}", self.elems.len(), 2 * d)));
        }
        if let Some(&bad) = self.elems.iter().find(|&&e| e >> ctx.w() != 0) {
            return Err(violation(format!("element {bad:#x} does not fit in {} bits", ctx.w())));
        }
        Ok(())
    }
}

/// Bits one party sends: `2d * w`.
pub fn syndrome_bits(d: usize, ctx: &FieldContext) -> usize {
    2 * d * ctx.w() as usize
}

/// Odd power sums of the support of `s` (positions `< ctx.universe()`).
pub fn syndrome_message(s: &BitString, ctx: &FieldContext, d: usize) -> Result<SyndromeMessage> {
    if s.len() > ctx.universe() {
        return Err(violation(format!("string of length {} exceeds universe {}", s.len(), ctx.universe())));
    }
    Ok(SyndromeMessage { elems: odd_power_sums(s.ones_positions(), ctx, d) })
}

fn odd_power_sums(support: impl Iterator<Item = usize>, ctx: &FieldContext, d: usize) -> Vec<u32> {
    let order = ctx.order() as u64;
    let mut elems = vec![0u32; 2 * d];
    for i in support {
        let i = i as u64 % order;
        let step = 2 * i % order;
        let mut e = i;
        for slot in elems.iter_mut() {
            *slot ^= ctx.pow_g(e);
            e = (e + step) % order;
        }
    }
    elems
}

/// Full syndrome sequence `S_1..S_{4d}` from the odd ones (`S_{2j} = S_j^2`).
fn expand_syndromes(odd: &[u32], ctx: &FieldContext) -> Vec<u32> {
    let n = 2 * odd.len();
    let mut s = vec![0u32; n + 1];
    for j in 1..=n {
        s[j] = if j % 2 == 1 { odd[j / 2] } else { ctx.square(s[j / 2]) };
    }
    s
}

/// Shortest LFSR (connection polynomial, lowest degree first) generating `s[1..]`.
fn berlekamp_massey(s: &[u32], ctx: &FieldContext) -> (Vec<u32>, usize) {
    let n = s.len() - 1;
    let mut c = vec![0u32; n + 2];
    let mut b = vec![0u32; n + 2];
    c[0] = 1;
    b[0] = 1;
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last = 1u32;
    for r in 0..n {
        let mut delta = s[r + 1];
        for i in 1..=len {
            delta ^= ctx.mul(c[i], s[r + 1 - i]);
        }
        if delta == 0 {
            shift += 1;
            continue;
        }
        let coef = ctx.div(delta, last);
        let prev = c.clone();
        for i in 0..c.len() - shift {
            c[i + shift] ^= ctx.mul(coef, b[i]);
        }
        if 2 * len <= r {
            len = r + 1 - len;
            b = prev;
            last = delta;
            shift = 1;
        } else {
            shift += 1;
        }
    }
    c.truncate(len + 1);
    (c, len)
}

fn eval(poly: &[u32], x: u32, ctx: &FieldContext) -> u32 {
    poly.iter().rev().fold(0, |acc, &coef| ctx.mul(acc, x) ^ coef)
}

/// Positions `i < universe` with `locator(g^{-i}) = 0`.
fn chien_roots(locator: &[u32], ctx: &FieldContext) -> Vec<usize> {
    let order = ctx.order() as u64;
    (0..ctx.universe())
        .filter(|&i| eval(locator, ctx.pow_g(order - i as u64 % order), ctx) == 0)
        .collect()
}

/// Recovered difference pattern, or `None` when decoding does not verify.
pub fn decode_positions(syn: &SyndromeMessage, ctx: &FieldContext, d: usize) -> Option<Vec<usize>> {
    let full = expand_syndromes(&syn.elems, ctx);
    let (locator, len) = berlekamp_massey(&full, ctx);
    if len > 2 * d || locator.last().copied().unwrap_or(0) == 0 {
        return None;
    }
    if len == 0 {
        return Some(Vec::new());
    }
    let roots = chien_roots(&locator, ctx);
    if roots.len() != len {
        return None;
    }
    let check = odd_power_sums(roots.iter().copied(), ctx, d);
    (check == syn.elems).then_some(roots)
}

/// Weight of the difference pattern; exact whenever it is at most `2d`.
pub fn decode_weight(syn: &SyndromeMessage, ctx: &FieldContext, d: usize) -> Option<usize> {
    decode_positions(syn, ctx, d).map(|p| p.len())
}

pub fn combine(a: &SyndromeMessage, b: &SyndromeMessage) -> SyndromeMessage {
    SyndromeMessage { elems: a.elems.iter().zip(&b.elems).map(|(x, y)| x ^ y).collect() }
}

/// Referee of the syndrome protocol: `LE` iff decoding succeeds with weight `<= d`.
pub fn inner_decide(a: &SyndromeMessage, b: &SyndromeMessage, ctx: &FieldContext, d: usize) -> Result<Verdict> {
    a.check(ctx, d)?;
    b.check(ctx, d)?;
    let le = matches!(decode_weight(&combine(a, b), ctx, d), Some(t) if t <= d);
    Ok(Verdict::from_bit(!le))
}

/// Full-send baseline: both strings go to the referee, which compares exactly.
pub fn inner_reference(a: &BitString, b: &BitString, d: usize) -> Result<Verdict> {
    Ok(Verdict::from_bit(hamming_distance(a, b)? > d))
}
