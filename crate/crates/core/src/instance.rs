//! The exact threshold predicate and the test-instance factory.

use rand::seq::index;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bits::{hamming_distance, BitString};
use crate::coins::{streams, CoinStream};
use crate::error::{invalid, Result};

/// A referee's answer. `Le` is `HAM = 0` (distance at most the threshold),
/// `Gt` is `HAM = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Le,
    Gt,
}

impl Verdict {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Verdict::Gt
        } else {
            Verdict::Le
        }
    }

    pub fn as_bit(self) -> bool {
        self == Verdict::Gt
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Le => "LE",
            Verdict::Gt => "GT",
        })
    }
}

/// `HAM_{n,d}(x, y)`: true iff the strings differ in more than `d` positions.
pub fn ham_predicate(x: &BitString, y: &BitString, d: usize) -> Result<bool> {
    if d < 1 || d > x.len() {
        return Err(invalid(format!("threshold d={d} outside 1..={}", x.len())));
    }
    Ok(hamming_distance(x, y)? > d)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub x: BitString,
    pub y: BitString,
    /// Exact distance between `x` and `y`.
    pub k: usize,
}

impl Instance {
    pub fn new(x: BitString, y: BitString) -> Result<Self> {
        let k = hamming_distance(&x, &y)?;
        Ok(Instance { x, y, k })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

/// Uniform `x` of length `n` and `y` obtained by flipping a uniformly random
/// `k`-subset of positions. Draws from the instance stream of `seed`.
pub fn gen_instance(n: usize, k: usize, seed: u64) -> Result<Instance> {
    let mut coins = CoinStream::new(seed, streams::INSTANCE);
    gen_instance_from(n, k, &mut coins)
}

pub fn gen_instance_from(n: usize, k: usize, coins: &mut CoinStream) -> Result<Instance> {
    if n == 0 {
        return Err(invalid("length must be at least 1"));
    }
    if k > n {
        return Err(invalid(format!("distance {k} exceeds length {n}")));
    }
    let words = (0..n.div_ceil(64)).map(|_| coins.next_u64()).collect();
    let x = BitString::from_words(n, words);
    let mut y = x.clone();
    for p in index::sample(coins, n, k) {
        y.flip(p);
    }
    Ok(Instance { x, y, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn predicate_examples() {
        assert!(!ham_predicate(&bs("0101"), &bs("0110"), 2).unwrap());
        assert!(ham_predicate(&bs("0101"), &bs("0110"), 1).unwrap());
        let x = bs("1101");
        for d in 1..=4 {
            assert!(!ham_predicate(&x, &x, d).unwrap());
        }
        assert!(ham_predicate(&x, &x, 0).is_err());
        assert!(ham_predicate(&x, &x, 5).is_err());
        assert!(ham_predicate(&x, &bs("11"), 1).is_err());
    }

    #[test]
    fn extreme_distances() {
        let i = gen_instance(16, 0, 3).unwrap();
        assert_eq!(i.x, i.y);
        let i = gen_instance(16, 16, 3).unwrap();
        assert_eq!(i.y, i.x.complement());
        let i = gen_instance(4096, 7, 11).unwrap();
        assert_eq!(hamming_distance(&i.x, &i.y).unwrap(), 7);
        assert!(gen_instance(8, 9, 0).is_err());
    }

    #[test]
    fn requested_distance_is_exact() {
        let mut c = CoinStream::new(2024, 99);
        for _ in 0..1000 {
            let n = 1 + c.below(700) as usize;
            let k = c.below(n as u64 + 1) as usize;
            let i = gen_instance_from(n, k, &mut c).unwrap();
            assert_eq!(hamming_distance(&i.x, &i.y).unwrap(), k);
            assert_eq!(i.k, k);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(gen_instance(300, 20, 5).unwrap(), gen_instance(300, 20, 5).unwrap());
        assert_ne!(gen_instance(300, 20, 5).unwrap(), gen_instance(300, 20, 6).unwrap());
    }

    #[test]
    fn flipped_positions_are_spread() {
        // Each position is flipped with probability k/n.
        let (n, k, trials) = (32usize, 4usize, 20_000u64);
        let mut counts = vec![0u32; n];
        for t in 0..trials {
            let i = gen_instance(n, k, t).unwrap();
            for p in i.x.xor(&i.y).unwrap().ones_positions() {
                counts[p] += 1;
            }
        }
        let expect = trials as f64 * k as f64 / n as f64;
        let sd = (expect * (1.0 - k as f64 / n as f64)).sqrt();
        for c in counts {
            assert!((c as f64 - expect).abs() < 5.0 * sd, "{c} vs {expect}");
        }
    }
}
