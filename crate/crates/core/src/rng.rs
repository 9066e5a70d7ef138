//! Seed derivation for reproducible runs.
//!
//! Every randomised step draws from its own `ChaCha8Rng`, seeded from the user
//! seed plus a stream index and a purpose tag. No stream is shared between
//! ensemble members, so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed, a stream index and a tag into a single 64-bit seed.
pub fn derive_seed(seed: u64, index: u64, tag: &str) -> u64 {
    // FNV-1a over the tag keeps the mapping stable across platforms.
    let tag_hash = tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    });
    splitmix64(splitmix64(splitmix64(seed) ^ index) ^ tag_hash)
}

pub fn stream(seed: u64, index: u64, tag: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index, tag))
}
