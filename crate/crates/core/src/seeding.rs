//! Deterministic seed derivation.
//!
//! Batch runs derive one sub-seed per (dimension, sample) so results do not
//! depend on execution order or thread scheduling. The mixer is splitmix64,
//! fixed here so output stays stable across Rust and dependency versions.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Mixes a run seed with per-sample coordinates into an independent sub-seed.
pub fn derive_seed(run_seed: u64, dim: u64, sample_index: u64) -> u64 {
    let mut h = splitmix64(run_seed);
    h = splitmix64(h ^ dim.wrapping_mul(0xd6e8_feb8_6659_fd93));
    splitmix64(h ^ sample_index)
}

/// The reproducible generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
