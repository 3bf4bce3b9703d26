//! Deterministic random streams.
//!
//! Every random quantity in a campaign is drawn from a stream identified by
//! `(root seed, purpose, index)`. Streams are derived by hashing that triple,
//! so trial `t` sees the same numbers no matter which thread runs it or in
//! which order trials are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    FrequencyDraw = 1,
    Noise = 2,
    Amplitude = 3,
    Placement = 4,
    Offsets = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `(root, purpose, index)`.
pub fn derive_seed(root: u64, purpose: Stream, index: u64) -> u64 {
    let tag = splitmix64((purpose as u64) << 56 ^ splitmix64(index));
    splitmix64(root ^ tag)
}

pub fn stream_rng(root: u64, purpose: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, purpose, index))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
