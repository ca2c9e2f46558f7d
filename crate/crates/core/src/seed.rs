//! Seed derivation shared by every randomized stage.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a named stage of a pipeline.
pub fn derive(seed: u64, stage: u64) -> u64 {
    mix(seed ^ mix(stage.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Generator for a given seed and round. Rounds map to independent ChaCha
/// streams, so rerunning a sampling loop never reuses randomness.
pub fn rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}
