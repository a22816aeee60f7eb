//! Per-image, per-stage random streams.
//!
//! Every stream is seeded from `(seed, image_index, stage)` alone, so output
//! does not depend on generation order or thread count, and toggling one
//! stage never shifts the draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Background = 1,
    Objects = 2,
    Overlay = 3,
    Fog = 4,
    Noise = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stage_rng(seed: u64, image_index: u64, stage: Stage) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ image_index) ^ stage as u64);
    ChaCha8Rng::seed_from_u64(mixed)
}
