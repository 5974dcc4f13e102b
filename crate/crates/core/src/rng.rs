//! Counter-based deterministic randomness.
//!
//! Every random quantity in this crate is a pure function of a 64-bit key and
//! a 64-bit counter, evaluated through the SplitMix64 output permutation.
//! Random access into a stream costs a handful of multiplies, so per-sample
//! tapes can be regenerated (or evaluated lazily, entry by entry) in any
//! order and on any number of threads without changing a single bit of the
//! result. Streams are split by deriving sub-keys under fixed domain tags.
//!
//! This is simulation-grade randomness, not cryptographic.

/// Weyl increment of the SplitMix64 sequence (2^64 / golden ratio).
pub const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Domain tags keeping independent uses of the same master seed apart.
pub mod domain {
    /// Per-sample diffusion tapes.
    pub const TAPE: u64 = 1;
    /// Graph generation.
    pub const NETGEN: u64 = 2;
    /// Random Greedy candidate draws.
    pub const GREEDY: u64 = 3;
    /// Test fixtures and instance generation.
    pub const FIXTURE: u64 = 4;
}

/// SplitMix64 finalizer (Stafford mix 13).
#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Value at position `index` of the SplitMix64 stream seeded with `key`.
#[inline]
pub fn at(key: u64, index: u64) -> u64 {
    mix(key.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derives an independent sub-key from `key` for the given domain tag.
#[inline]
pub fn derive(key: u64, tag: u64) -> u64 {
    at(key, tag)
}

/// Maps 64 random bits to a double in `[0, 1)` using the top 53 bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A sequential view of a counter-based stream.
///
/// `RandomStream::new(seed, tag)` and the sequence of calls made on it fully
/// determine the values produced; there is no global state.
#[derive(Clone, Debug)]
pub struct RandomStream {
    key: u64,
    counter: u64,
}

impl RandomStream {
    pub fn new(seed: u64, tag: u64) -> Self {
        RandomStream {
            key: derive(seed, tag),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = at(self.key, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform double in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform integer in `[0, n)` via the multiply-shift reduction.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Fisher-Yates shuffle driven by this stream.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
