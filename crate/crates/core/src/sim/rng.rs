//! Deterministic random substreams.
//!
//! Every consumer of randomness gets its own stream keyed by the run seed, a
//! tag and an index, so adding draws in one place never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn tag_hash(tag: &str) -> u64 {
    // FNV-1a
    tag.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

/// Hash of a seed, a tag and a list of indices.
pub fn key(seed: u64, tag: &str, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix(seed ^ tag_hash(tag)), |h, p| mix(h ^ mix(*p)))
}

pub fn substream(seed: u64, tag: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key(seed, tag, &[index]))
}

/// Uniform draw in [0, 1) fixed by its key.
pub fn unit(seed: u64, tag: &str, parts: &[u64]) -> f64 {
    (key(seed, tag, parts) >> 11) as f64 / (1u64 << 53) as f64
}
