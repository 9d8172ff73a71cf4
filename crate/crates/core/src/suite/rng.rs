//! Seeded uniform draws used by the randomized problems.
//!
//! The stream is SplitMix64 seeded with the 64-bit seed itself; each draw maps
//! the top 53 bits of one output word to `[0, 1)` and then affinely to
//! `[a, b)`. Nothing else touches the generator, so a seed reproduces the same
//! matrices on every platform.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct SuiteRng {
    inner: SplitMix64,
}

impl SuiteRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::from_seed(seed.to_le_bytes()),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// `(z >> 11) · 2⁻⁵³`, in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.unit()
    }
}
