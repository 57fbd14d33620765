//! Fixed-length packed bit strings.
//!
//! Bits are stored little-endian inside `u64` words: position `i` lives in word
//! `i / 64` at bit `i % 64`. Bits past `len` in the last word are always zero,
//! which lets weight and distance be plain population counts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = BitString { len, words: vec![u64::MAX; words_for(len)] };
        s.clear_tail();
        s
    }

    /// Builds a string from raw words; bits beyond `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut s = BitString { len, words };
        s.clear_tail();
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        BitString { len, words }
    }

    /// String of length `len` with ones exactly at `positions`.
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(len);
        for &p in positions {
            if p >= len {
                return Err(crate::error::invalid(format!("position {p} out of range for length {len}")));
            }
            s.set(p, true);
        }
        Ok(s)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the weight.
    pub fn parity(&self) -> bool {
        self.words.iter().fold(0u64, |acc, w| acc ^ w).count_ones() & 1 == 1
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { left: self.len, right: other.len });
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        Ok(BitString { len: self.len, words })
    }

    /// Mod-2 inner product `<self, other>`.
    pub fn dot(&self, other: &BitString) -> Result<bool> {
        self.check_len(other)?;
        Ok(dot_words(&self.words, &other.words))
    }

    pub fn complement(&self) -> BitString {
        let mut s = BitString { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        s.clear_tail();
        s
    }

    /// Copy extended with zeros to `new_len` (no-op when already that long).
    pub fn zero_padded(&self, new_len: usize) -> BitString {
        assert!(new_len >= self.len, "cannot pad {} bits down to {new_len}", self.len);
        let mut words = self.words.clone();
        words.resize(words_for(new_len), 0);
        BitString { len: new_len, words }
    }

    /// Positions holding a one, ascending.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Parity of the popcount of `a & b`, over the shorter of the two slices.
#[inline]
pub(crate) fn dot_words(a: &[u64], b: &[u64]) -> bool {
    let acc = a.iter().zip(b).fold(0u64, |acc, (x, y)| acc ^ (x & y));
    acc.count_ones() & 1 == 1
}

/// Number of positions where `x` and `y` differ.
pub fn hamming_distance(x: &BitString, y: &BitString) -> Result<usize> {
    x.check_len(y)?;
    Ok(x.words.iter().zip(&y.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum())
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={}, weight={})", self.len, self.weight())
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Malformed(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitString::from_bits(bits))
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&bs("0101"), &bs("0110")).unwrap(), 2);
        let x = bs("10110010");
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0);
        assert_eq!(hamming_distance(&x, &x.complement()).unwrap(), 8);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let err = hamming_distance(&bs("01"), &bs("011")).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { left: 2, right: 3 });
        assert!(bs("01").xor(&bs("0")).is_err());
    }

    #[test]
    fn tail_bits_stay_clear() {
        let s = BitString::ones(70);
        assert_eq!(s.weight(), 70);
        assert_eq!(s.complement().weight(), 0);
        assert_eq!(BitString::from_words(3, vec![u64::MAX]).weight(), 3);
    }

    #[test]
    fn ones_positions_cross_words() {
        let s = BitString::from_positions(200, &[0, 63, 64, 199]).unwrap();
        assert_eq!(s.ones_positions().collect::<Vec<_>>(), vec![0, 63, 64, 199]);
        assert!(BitString::from_positions(10, &[10]).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("01x".parse::<BitString>().is_err());
        assert_eq!(bs("").len(), 0);
    }

    #[test]
    fn padding_preserves_distance() {
        let x = bs("10111");
        let y = bs("00110");
        let d = hamming_distance(&x, &y).unwrap();
        assert_eq!(hamming_distance(&x.zero_padded(130), &y.zero_padded(130)).unwrap(), d);
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<bool>, Vec<bool>, Vec<bool>)> {
        (1usize..300).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn metric_and_xor_laws((a, b, c) in arb_pair()) {
            let (x, y, z) = (BitString::from_bits(a.clone()), BitString::from_bits(b.clone()), BitString::from_bits(c));
            let dxy = hamming_distance(&x, &y).unwrap();
            prop_assert_eq!(dxy, hamming_distance(&y, &x).unwrap());
            prop_assert!(hamming_distance(&x, &z).unwrap() <= dxy + hamming_distance(&y, &z).unwrap());
            let e = x.xor(&y).unwrap();
            prop_assert_eq!(e.weight(), dxy);
            prop_assert_eq!(e.parity(), x.parity() ^ y.parity());
            let naive = a.iter().zip(&b).filter(|(p, q)| p != q).count();
            prop_assert_eq!(dxy, naive);
        }

        #[test]
        fn display_round_trip(a in proptest::collection::vec(any::<bool>(), 0..200)) {
            let x = BitString::from_bits(a);
            prop_assert_eq!(x.to_string().parse::<BitString>().unwrap(), x);
        }
    }
}
