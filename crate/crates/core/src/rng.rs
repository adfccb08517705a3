//! Seeded, splittable random number generation.
//!
//! Every randomized routine takes its generator explicitly. Parallel work derives
//! independent child streams with [`SplitRng::split`], which depends only on the
//! parent key and the child index, never on how much the parent has been used.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator keyed by a 64-bit value.
#[derive(Debug, Clone)]
pub struct SplitRng {
    key: u64,
    inner: ChaCha8Rng,
}

impl SplitRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The key this generator was created from.
    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream number `index`.
    pub fn split(&self, index: u64) -> Self {
        let child = splitmix64(self.key ^ splitmix64(index.wrapping_add(1)));
        Self::new(child)
    }
}

impl RngCore for SplitRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
