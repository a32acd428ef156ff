//! Seed derivation. Every random stream in the crate is a ChaCha stream keyed
//! by the master seed and selected by a stable hash of task indices, so results
//! do not depend on how tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stable 64-bit label for a path of task indices.
pub fn stream_id(indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(0x5851_f42d_4c95_7f2d, |acc, &i| mix(acc ^ mix(i)))
}

/// Random generator for the task identified by `indices` under `seed`.
pub fn task_rng(seed: u64, indices: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(indices));
    rng
}
