//! Counter-based seed derivation.
//!
//! Every random stream in the crate is keyed by a pure function of
//! `(master_seed, index, purpose)`, so trials can be generated in any order
//! or on any thread and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a sequence of words into one 64-bit value.
pub fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(0x6A09_E667_F3BC_C909, |acc, &w| mix64(acc ^ mix64(w)))
}

/// Maps a hash to a uniform value strictly inside `(0, 1)`.
#[inline]
pub fn unit_open(h: u64) -> f64 {
    ((h >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// What a derived random stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Scenario,
    Buildings,
    UavHeight,
    Fading,
    Shuffle,
    Split,
    Init,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Scenario => 0x5343_454E,
            Purpose::Buildings => 0x4255_494C,
            Purpose::UavHeight => 0x4845_4947,
            Purpose::Fading => 0x4641_4445,
            Purpose::Shuffle => 0x5348_5546,
            Purpose::Split => 0x5350_4C54,
            Purpose::Init => 0x494E_4954,
        }
    }
}

pub fn derive_seed(master: u64, index: u64, purpose: Purpose) -> u64 {
    hash_words(&[master, purpose.tag(), index])
}

pub fn derive_rng(master: u64, index: u64, purpose: Purpose) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, index, purpose))
}
