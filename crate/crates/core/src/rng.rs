//! Seeded random streams. Each trial owns one ChaCha8 stream whose seed is a
//! fixed mix of the experiment's base seed and the trial index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-trial seed. Changing this function changes every report.
pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    mix64(mix64(base_seed).wrapping_add(trial_index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

pub fn trial_rng(base_seed: u64, trial_index: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(trial_seed(base_seed, trial_index))
}
