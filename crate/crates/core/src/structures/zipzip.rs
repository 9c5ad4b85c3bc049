use crate::error::Result;
use crate::hi::fingerprint::FingerprintWriter;
use crate::oracle::{
    geometric_from_bits, oracle_value, Frequency, Key, Seed, STREAM_RANK, STREAM_TIEBREAK,
};

use super::ranked::{RankRule, RankedTree};
use super::Weight;

/// Zip-zip node rank, ordered lexicographically by `(r1, r2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RankPair {
    pub r1: i32,
    pub r2: u32,
}

/// Exact `floor(log2 w)` for positive finite `w`, subnormals included.
fn floor_log2(w: f64) -> i32 {
    let bits = w.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let mantissa = bits & ((1u64 << 52) - 1);
        -1074 + (63 - mantissa.leading_zeros() as i32)
    } else {
        exp - 1023
    }
}

/// Biased zip-zip rank: `r1 = floor(log2 w) + Geom(1/2)`, `r2` a 32-bit uniform.
pub fn zz_rank(seed: Seed, key: Key, weight: Weight) -> RankPair {
    let geometric = geometric_from_bits(oracle_value(seed, key, STREAM_RANK)) as i32;
    RankPair {
        r1: floor_log2(weight.get()) + geometric,
        r2: oracle_value(seed, key, STREAM_TIEBREAK) as u32,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZipZipRank {
    pub biased: bool,
}

impl RankRule for ZipZipRank {
    type Rank = RankPair;

    fn name(&self) -> &'static str {
        if self.biased {
            "biased-zipzip"
        } else {
            "zipzip"
        }
    }

    fn rank(&self, seed: Seed, key: Key, weight: Weight) -> Result<RankPair> {
        let w = if self.biased { weight } else { Weight::ONE };
        Ok(zz_rank(seed, key, w))
    }

    fn stored_weight(&self, weight: Weight) -> f64 {
        if self.biased {
            weight.get()
        } else {
            1.0
        }
    }

    fn weight_for(&self, f: Frequency) -> Result<Weight> {
        if self.biased {
            Weight::new(f.get())
        } else {
            Ok(Weight::ONE)
        }
    }

    fn encode_rank(rank: &RankPair, w: &mut FingerprintWriter) {
        w.i64(i64::from(rank.r1)).u64(u64::from(rank.r2));
    }
}

/// Zip-zip tree: a treap whose priorities are the rank pairs above.
pub type ZipZipTree = RankedTree<ZipZipRank>;

impl ZipZipTree {
    /// Frequency-oblivious zip-zip tree (all weights 1).
    pub fn uniform(seed: Seed) -> Self {
        RankedTree::with_rule(ZipZipRank { biased: false }, seed)
    }

    /// Biased zip-zip tree: a key of weight `w` sits at depth `O(log W/w)`.
    pub fn biased(seed: Seed) -> Self {
        RankedTree::with_rule(ZipZipRank { biased: true }, seed)
    }
}
