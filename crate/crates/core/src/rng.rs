//! Seeded randomness.
//!
//! Every stochastic routine draws from [`SeedRng`], ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`. Child seeds (per instance, per attempt, per
//! run) come from [`derive_seed`] so that batch results do not depend on the
//! order in which work items are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeedRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeedRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child of `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}
