//! Shared primitives: keys, frequency estimates, seeds, comparison tallies and
//! the keyed pseudorandom oracle that gives every key its canonical random bits.
//!
//! All structural randomness in this crate is a pure function of `(Seed, Key)`.
//! A key that is deleted and later reinserted therefore receives exactly the
//! same ranks and priorities, which is what makes the randomized trees uniquely
//! represented.

use std::fmt;
use std::ops::AddAssign;

use crate::error::{Error, Result};

/// Ordered key identifier. Experiments use ranks `1..=n`.
pub type Key = u64;

/// Stream used for the primary geometric draw of a node rank.
pub const STREAM_RANK: u32 = 0;
/// Stream used for rank tie-breakers.
pub const STREAM_TIEBREAK: u32 = 1;
/// Stream used for treap uniforms.
pub const STREAM_TREAP: u32 = 2;
/// Stream reserved for dynamic-scheme coin flips. Never used for structure shape.
pub const STREAM_SCHEME: u32 = 7;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// Secret per-instance seed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    /// Derives an independent child seed, e.g. one per benchmark trial.
    pub fn child(self, label: u64) -> Seed {
        Seed(mix64(self.0 ^ mix64(label.wrapping_add(GOLDEN))))
    }
}

impl From<u64> for Seed {
    fn from(value: u64) -> Self {
        Seed(value)
    }
}

/// Predicted access frequency in `[0, 1]`. Zero means "no estimate".
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    pub const ZERO: Frequency = Frequency(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Frequency(value))
        } else {
            Err(Error::Domain(format!("frequency {value} outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_estimated(self) -> bool {
        self.0 > 0.0
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Number of key comparisons spent by one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComparisonTally(pub u64);

impl ComparisonTally {
    pub fn get(self) -> u64 {
        self.0
    }

    pub(crate) fn tick(&mut self) {
        self.0 += 1;
    }
}

impl AddAssign<u64> for ComparisonTally {
    fn add_assign(&mut self, rhs: u64) {
        self.0 += rhs;
    }
}

/// SplitMix64 finalizer; a bijection on `u64`.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed pseudorandom function of `(seed, key, stream)`.
///
/// Two rounds of the SplitMix finalizer, each keyed by seed and stream. Not a
/// cryptographic PRF; it only has to look uniform to the structures and tests.
pub fn oracle_value(seed: Seed, key: Key, stream: u32) -> u64 {
    let k0 = mix64(seed.0 ^ GOLDEN.wrapping_mul(u64::from(stream) + 1));
    let k1 = mix64(k0.wrapping_add(GOLDEN));
    mix64(mix64(key ^ k0).wrapping_add(k1) ^ key.rotate_left(29))
}

/// Number of leading set bits: a Geometric(1/2) failure count capped at 64.
pub fn geometric_from_bits(bits: u64) -> u32 {
    bits.leading_ones()
}

/// Maps 64 oracle bits to a uniform real in the open interval `(0, 1)`.
pub fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) / (1u64 << 52) as f64
}
