//! Seeded random source.
//!
//! Every random decision in the whole pipeline draws from exactly one
//! `RandomSource`, so a run is replayable from its 64-bit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub struct RandomSource {
    rng: ChaCha12Rng,
    seed: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            rng: ChaCha12Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform variate in [0,1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.rng.gen_range(0..n)
    }
}
