//! Deterministic seeding: every trial gets an independent ChaCha stream
//! derived from (master seed, n, trial index) by a splitmix64 mix.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Master seed for a sampler or a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Mix (master, n, trial) into a 64-bit stream seed. Frozen: changing this
/// changes every recorded experiment.
pub fn trial_seed(master: Seed, n: usize, trial: u64) -> Seed {
    let a = splitmix64(master.0 ^ 0x243f6a8885a308d3);
    let b = splitmix64(a ^ (n as u64).wrapping_mul(0x9e3779b97f4a7c15));
    Seed(splitmix64(b ^ trial))
}

/// The RNG used everywhere in the crate.
pub fn rng_from_seed(seed: Seed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.0)
}
