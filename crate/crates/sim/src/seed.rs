//! Seed derivation. Every stream of random numbers in a sweep is keyed by a
//! path of integers hashed through SplitMix64, so results do not depend on
//! scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_xoshiro::SplitMix64;

/// Name of the generator behind every stream, recorded in run manifests.
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha), seeds derived with SplitMix64";

const CHANNEL_STREAM: u64 = 0x4348_414e;
const SOLVER_STREAM: u64 = 0x534f_4c56;

pub fn derive(root: u64, path: &[u64]) -> u64 {
    let mut state = SplitMix64::seed_from_u64(root).next_u64();
    for &p in path {
        state = SplitMix64::seed_from_u64(state ^ p).next_u64();
    }
    state
}

/// Seed of the channel draw for one realization. It depends on nothing
/// else, so every element count, rate profile and scheme sees the same
/// fading realization.
pub fn channel_seed(master: u64, realization: usize) -> u64 {
    derive(master, &[CHANNEL_STREAM, realization as u64])
}

/// Seed of the optimizer's random start for one realization and surface
/// size.
pub fn solver_seed(channel_seed: u64, n_elements: usize) -> u64 {
    derive(channel_seed, &[SOLVER_STREAM, n_elements as u64])
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}
