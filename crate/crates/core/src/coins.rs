//! Public-coin randomness shared by every party of a protocol run.
//!
//! A [`CoinStream`] is addressed by `(seed, stream_id, counter)`: the draw at a
//! given counter is a pure function of those three values, so Alice, Bob and the
//! referee each rebuild identical coins from the seed alone. Each stream is a
//! SplitMix64 sequence whose starting state is derived from `(seed, stream_id)`;
//! the state after `t` draws is `key + t * GOLDEN`, which makes every draw
//! directly addressable. `counter` counts 64-bit draws.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

/// Stream-id allocation. Sub-indices (amplification repetitions) live above bit 8.
pub mod streams {
    /// Biased vectors `z_1..z_gamma` of the gap test.
    pub const GAP_VECTORS: u64 = 0;
    /// Shuffle driving the bucket partition.
    pub const PARTITION: u64 = 1;
    /// Test-instance generation.
    pub const INSTANCE: u64 = 2;
    /// Per-trial seed derivation from a base seed.
    pub const TRIAL_SEEDS: u64 = 3;
    /// Independent-assignment bucket model used only by analysis code.
    pub const IID_BUCKETS: u64 = 4;

    /// Gap-vector stream for amplification repetition `rep`.
    pub const fn gap_vectors(rep: u32) -> u64 {
        GAP_VECTORS | ((rep as u64) << 8)
    }
}

/// SplitMix64 state increment.
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn splitmix_at(state: u64) -> u64 {
    SplitMix64::from_seed(state.to_le_bytes()).next_u64()
}

#[derive(Clone, Debug)]
pub struct CoinStream {
    seed: u64,
    stream_id: u64,
    key: u64,
    counter: u64,
}

impl CoinStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = splitmix_at(seed ^ splitmix_at(stream_id ^ 0x5eed_5eed_5eed_5eed));
        CoinStream { seed, stream_id, key, counter: 0 }
    }

    /// Stream positioned at `counter`.
    pub fn at(seed: u64, stream_id: u64, counter: u64) -> Self {
        CoinStream { counter, ..Self::new(seed, stream_id) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    #[inline]
    fn draw(&mut self) -> u64 {
        let v = splitmix_at(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)));
        self.counter += 1;
        v
    }

    /// Uniform integer in `[0, bound)`, without modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound >= 1, "bound must be positive");
        self.gen_range(0..bound)
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.draw() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One bit that is 1 with probability exactly `1/denom`.
    pub fn biased_bit(&mut self, denom: u64) -> bool {
        self.below(denom) == 0
    }

    /// 64 independent lanes, each 1 with probability exactly `1/denom`.
    ///
    /// Bit-sliced comparison of a uniform real per lane against the binary
    /// expansion of `1/denom`: a lane settles at the first random bit that
    /// differs from the expansion. Dyadic `denom = 2^j` settles in exactly `j`
    /// rounds; other denominators terminate with probability 1.
    pub fn biased_word(&mut self, denom: u64) -> u64 {
        assert!(denom >= 1, "denominator must be positive");
        if denom == 1 {
            return u64::MAX;
        }
        let mut open = u64::MAX;
        let mut ones = 0u64;
        let mut rem = 1u128;
        let denom = denom as u128;
        loop {
            rem <<= 1;
            let p_bit = rem >= denom;
            if p_bit {
                rem -= denom;
            }
            let u = self.draw();
            if p_bit {
                ones |= open & !u;
                open &= u;
            } else {
                open &= !u;
            }
            // Expansion exhausted: open lanes sit at or above 1/denom.
            if rem == 0 || open == 0 {
                return ones;
            }
        }
    }
}

impl RngCore for CoinStream {
    fn next_u32(&mut self) -> u32 {
        self.draw() as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.draw()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let v = self.draw().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}

/// Fills whole vectors of `1/denom`-biased bits, one expansion bit per round
/// across every still-open word, drawing coins in bulk.
///
/// Same lane law as [`CoinStream::biased_word`], different coin consumption.
#[derive(Debug, Clone)]
pub struct BiasedFiller {
    denom: u64,
    open: Vec<u64>,
    open_idx: Vec<usize>,
    buf: Vec<u64>,
}

impl BiasedFiller {
    pub fn new(denom: u64) -> Self {
        assert!(denom >= 1, "denominator must be positive");
        BiasedFiller { denom, open: Vec::new(), open_idx: Vec::new(), buf: Vec::new() }
    }

    pub fn fill(&mut self, coins: &mut CoinStream, out: &mut [u64]) {
        if self.denom == 1 {
            out.fill(u64::MAX);
            return;
        }
        out.fill(0);
        self.open.clear();
        self.open.resize(out.len(), u64::MAX);
        self.open_idx.clear();
        self.open_idx.extend(0..out.len());
        let denom = self.denom as u128;
        let mut rem = 1u128;
        while !self.open_idx.is_empty() {
            rem <<= 1;
            let p_bit = rem >= denom;
            if p_bit {
                rem -= denom;
            }
            self.buf.clear();
            self.buf.extend((0..self.open_idx.len()).map(|_| coins.draw()));
            for (&w, &u) in self.open_idx.iter().zip(&self.buf) {
                let open = &mut self.open[w];
                if p_bit {
                    out[w] |= *open & !u;
                    *open &= u;
                } else {
                    *open &= !u;
                }
            }
            if rem == 0 {
                break;
            }
            let open = &self.open;
            self.open_idx.retain(|&w| open[w] != 0);
        }
    }
}

/// `draw_biased_bit`: 1 with probability exactly `1/denom`.
pub fn draw_biased_bit(stream: &mut CoinStream, denom: u64) -> bool {
    stream.biased_bit(denom)
}

/// Seed of trial `index` under `base_seed`; independent of evaluation order.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    CoinStream::at(base_seed, streams::TRIAL_SEEDS, index).next_u64()
}
