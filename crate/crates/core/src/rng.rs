//! Seeded random streams.
//!
//! All randomness in the crate comes from ChaCha8, which produces the same
//! stream on every platform. Independent substreams are keyed by a stable
//! 64-bit FNV-1a hash of a label (typically a document id), so results do not
//! depend on the order in which items are visited.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// FNV-1a over the UTF-8 bytes of `label`.
pub fn stable_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Substream of `seed` dedicated to `label`.
pub fn substream(seed: u64, label: &str) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stable_hash(label));
    rng
}
