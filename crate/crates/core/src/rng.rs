//! Seeded random streams.
//!
//! Every stochastic draw in the crate comes from a ChaCha8 stream keyed by
//! `(seed, domain, index)`. The 256-bit ChaCha key is four consecutive
//! SplitMix64 outputs started from
//!
//! ```text
//! state = mix(mix(seed ^ DOMAIN_SALT * (domain + 1)) ^ index)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer (constants `0x9E3779B97F4A7C15`,
//! `0xBF58476D1CE4E5B9`, `0x94D049BB133111EB`) and
//! `DOMAIN_SALT = 0xD1B54A32D192ED03`. Because each iteration of a Monte-Carlo
//! loop owns its stream, results do not depend on how iterations are
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const DOMAIN_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// Independent stream families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Domain {
    Sample = 0,
    MeanCurve = 1,
    Calibration = 2,
    Permutation = 3,
    Trial = 4,
    KsReference = 5,
    KsCalibration = 6,
    TrialSecond = 7,
    Insertion = 8,
}

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator, used only to expand stream keys.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        Self(state)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(GOLDEN);
        mix64(self.0)
    }
}

pub fn stream_key(seed: u64, domain: Domain, index: u64) -> u64 {
    let d = domain as u64 + 1;
    mix64(mix64(seed ^ DOMAIN_SALT.wrapping_mul(d)) ^ index)
}

pub fn stream(seed: u64, domain: Domain, index: u64) -> StreamRng {
    let mut sm = SplitMix64::new(stream_key(seed, domain, index));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&sm.next_u64().to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
