//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream whose
//! key is the master seed and whose 64-bit stream id is a hash of a small
//! tuple of counters (node, time, feature, repetition, ...). Draws are thus
//! addressed by position rather than by call order, and parallel generation
//! reproduces serial generation bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash an ordered tuple of counters into one 64-bit key.
pub fn mix(parts: &[u64]) -> u64 {
    let mut h = 0x6A09_E667_F3BC_C908_u64;
    for &p in parts {
        h = splitmix64(h ^ splitmix64(p));
    }
    h
}

/// Hash a string (FNV-1a) so labels can take part in counter tuples.
pub fn hash_str(s: &str) -> u64 {
    let mut h = 0xCBF2_9CE4_8422_2325_u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// A keyed family of independent streams.
#[derive(Clone, Debug)]
pub struct CounterRng {
    base: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The stream addressed by `counters`.
    pub fn stream(&self, counters: &[u64]) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(mix(counters));
        rng
    }
}
