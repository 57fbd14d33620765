//! Random even partition into `16 d^2` buckets and per-bucket parity.
//!
//! Positions are shuffled with the shared partition coins; shuffled slot `j`
//! belongs to bucket `j / s`. If no bucket holds two differing positions, the
//! parity strings are exactly as far apart as the inputs.

use rand::seq::SliceRandom;

use crate::bits::BitString;
use crate::coins::{streams, CoinStream};
use crate::error::{invalid, Error, Result};

/// `16 d^2`.
pub fn bucket_count(d: usize) -> usize {
    16 * d * d
}

/// Smallest multiple of `16 d^2` that is at least `n`.
pub fn pad_length(n: usize, d: usize) -> usize {
    let b = bucket_count(d);
    n.div_ceil(b) * b
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketPartition {
    n_padded: usize,
    buckets: usize,
    perm: Vec<u32>,
    bucket_of: Vec<u32>,
}

impl BucketPartition {
    /// Partition from an explicit permutation; slot `j` goes to bucket `j / s`.
    pub fn from_perm(perm: Vec<u32>, buckets: usize) -> Result<Self> {
        let n_padded = perm.len();
        if buckets == 0 || !n_padded.is_multiple_of(buckets) {
            return Err(invalid(format!("{buckets} buckets do not divide {n_padded} positions")));
        }
        let size = n_padded / buckets;
        let mut bucket_of = vec![u32::MAX; n_padded];
        for (slot, &pos) in perm.iter().enumerate() {
            let pos = pos as usize;
            if pos >= n_padded || bucket_of[pos] != u32::MAX {
                return Err(invalid("not a permutation"));
            }
            bucket_of[pos] = (slot / size) as u32;
        }
        Ok(BucketPartition { n_padded, buckets, perm, bucket_of })
    }

    pub fn n_padded(&self) -> usize {
        self.n_padded
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn bucket_size(&self) -> usize {
        self.n_padded / self.buckets
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn bucket_of(&self, position: usize) -> usize {
        self.bucket_of[position] as usize
    }

    /// Positions in bucket `b`.
    pub fn members(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        let s = self.bucket_size();
        self.perm[b * s..(b + 1) * s].iter().map(|&p| p as usize)
    }
}

/// Uniform even partition of `n_padded` positions into `16 d^2` buckets.
pub fn make_partition(n_padded: usize, d: usize, coins: &mut CoinStream) -> Result<BucketPartition> {
    let buckets = bucket_count(d);
    if n_padded == 0 || !n_padded.is_multiple_of(buckets) {
        return Err(invalid(format!("padded length {n_padded} is not a positive multiple of {buckets}")));
    }
    if n_padded > u32::MAX as usize {
        return Err(invalid("padded length exceeds 2^32"));
    }
    let mut perm: Vec<u32> = (0..n_padded as u32).collect();
    perm.shuffle(coins);
    BucketPartition::from_perm(perm, buckets)
}

/// Partition drawn from the partition stream of `seed`.
pub fn partition_for_seed(n_padded: usize, d: usize, seed: u64) -> Result<BucketPartition> {
    make_partition(n_padded, d, &mut CoinStream::new(seed, streams::PARTITION))
}

/// Per-bucket parities of `x`, zero-extended to the partition length.
pub fn reduce_string(x: &BitString, part: &BucketPartition) -> Result<BitString> {
    if x.len() > part.n_padded {
        return Err(invalid(format!("string of length {} exceeds partition length {}", x.len(), part.n_padded)));
    }
    let mut out = BitString::zeros(part.buckets);
    for p in x.ones_positions() {
        out.flip(part.bucket_of(p));
    }
    Ok(out)
}

/// True iff no bucket holds two or more positions where `x` and `y` differ.
pub fn collision_free(x: &BitString, y: &BitString, part: &BucketPartition) -> Result<bool> {
    let e = x.xor(y)?;
    if e.len() > part.n_padded {
        return Err(Error::LengthMismatch { left: e.len(), right: part.n_padded });
    }
    let mut seen = vec![false; part.buckets];
    for p in e.ones_positions() {
        let b = part.bucket_of(p);
        if seen[b] {
            return Ok(false);
        }
        seen[b] = true;
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self < other`, compared exactly.
    pub fn lt(self, other: Ratio) -> bool {
        (self.num as u128) * (other.den as u128) < (other.num as u128) * (self.den as u128)
    }
}

/// Union bound on a collision among `2d` balls in `16 d^2` independent
/// uniform buckets: `C(2d, 2) / (16 d^2) = (2d - 1) / (16 d)`.
pub fn collision_prob_bound(d: usize) -> Ratio {
    assert!(d >= 1);
    Ratio { num: 2 * d as u64 - 1, den: 16 * d as u64 }
}

/// Independent-assignment model: throw `balls` into `buckets` uniformly and
/// report whether two share a bucket.
pub fn iid_collision(balls: usize, buckets: usize, coins: &mut CoinStream) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(balls);
    (0..balls).any(|_| !seen.insert(coins.below(buckets as u64)))
}
