//! Portable seeded randomness for function generators.
//!
//! The generator is ChaCha8 keyed through `rand_core`'s `seed_from_u64`
//! (a PCG32 stream expands the `u64` seed into the 32-byte key). Uniform
//! doubles take the top 53 bits of `next_u64`: `u = (w >> 11) · 2^{-53}`.
//! Any language with a ChaCha8 implementation and the same key expansion
//! reproduces the sample streams exactly.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct ExperimentRng(ChaCha8Rng);

impl ExperimentRng {
    pub fn new(seed: u64) -> Self {
        ExperimentRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (-53f64).exp2()
    }

    /// Uniform on `[-amp, amp)`.
    pub fn symmetric(&mut self, amp: f64) -> f64 {
        amp * (2.0 * self.unit() - 1.0)
    }
}
