//! Seeded random streams shared by every randomized component.
//!
//! All randomness in the crate flows from a single 64-bit seed through the
//! SplitMix64 generator (Steele, Lea and Flood 2014), exposed by
//! `rand_xoshiro::SplitMix64`. For reference, one step is
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15            (wrapping)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9       (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB       (wrapping)
//! output z ^ (z >> 31)
//! ```
//!
//! and the derived draws are:
//!
//! * `open01`: `((x >> 11) as f64 + 0.5) * 2^-53`, strictly inside (0, 1);
//! * `below(m)`: `((x as u128 * m as u128) >> 64)`, the multiply-shift map
//!   onto `0..m` (no rejection step, so the bias is below `m / 2^64`);
//! * Fisher-Yates: for `i` from `n - 1` down to `1`, swap `i` with `below(i + 1)`.
//!
//! These three maps are the whole contract, so any implementation of
//! SplitMix64 reproduces revenue weights and stream orders exactly.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Clone, Debug)]
pub struct SeedStream {
    inner: SplitMix64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw strictly inside (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..bound`; `bound` must be positive.
    #[inline]
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// The underlying generator, for use with `rand` sampling helpers.
    pub fn rng(&mut self) -> &mut SplitMix64 {
        &mut self.inner
    }
}

/// Derives an independent sub-seed, e.g. per repetition or per trial.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut s = SeedStream::new(seed ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    s.next_u64()
}
