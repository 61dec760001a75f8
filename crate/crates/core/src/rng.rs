//! Seeding. Every stream is a ChaCha20 generator; per-channel streams use
//! `seed ^ channel`, per-replication seeds are mixed with splitmix64.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Recorded in every metadata sidecar and report.
pub const RNG_NAME: &str = "ChaCha20 (rand_chacha 0.9, seed_from_u64)";

pub fn channel_rng(seed: u64, channel: usize) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed ^ channel as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `index` of a batch started from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}
