//! Learned treaps used as non-robust baselines.
//!
//! * L-Treap: priority is the frequency itself (oracle bits break ties). The
//!   shape is fully determined by the estimates, so sorted insertion with
//!   monotone frequencies yields a path.
//! * C-Treap: priority `u^(1/f)` with `u` uniform in `(0, 1)`, the classic
//!   weighted-treap rule. Ordering is done on `ln(u)/f`, which is monotone in
//!   `u^(1/f)` and does not underflow for tiny `f`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::hi::fingerprint::FingerprintWriter;
use crate::oracle::{oracle_value, unit_open, Frequency, Key, Seed, STREAM_TIEBREAK, STREAM_TREAP};

use super::ranked::{RankRule, RankedTree};
use super::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreapVariant {
    L,
    C,
}

/// Real priority of a key. The root holds the maximum.
pub fn treap_priority(variant: TreapVariant, f: Frequency, seed: Seed, key: Key) -> Result<f64> {
    match variant {
        TreapVariant::L => Ok(f.get()),
        TreapVariant::C => {
            if !f.is_estimated() {
                return Err(Error::Domain("C-Treap priority needs f > 0".into()));
            }
            Ok(treap_uniform(seed, key).powf(1.0 / f.get()))
        }
    }
}

fn treap_uniform(seed: Seed, key: Key) -> f64 {
    unit_open(oracle_value(seed, key, STREAM_TREAP))
}

/// Totally ordered priority: a real score, then oracle tie-break bits.
#[derive(Clone, Copy, Debug)]
pub struct TreapPriority {
    pub score: f64,
    pub tiebreak: u64,
}

impl PartialEq for TreapPriority {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for TreapPriority {}

impl PartialOrd for TreapPriority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TreapPriority {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(self.tiebreak.cmp(&other.tiebreak))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreapRank {
    pub variant: TreapVariant,
}

impl RankRule for TreapRank {
    type Rank = TreapPriority;

    fn name(&self) -> &'static str {
        match self.variant {
            TreapVariant::L => "l-treap",
            TreapVariant::C => "c-treap",
        }
    }

    fn rank(&self, seed: Seed, key: Key, weight: Weight) -> Result<TreapPriority> {
        let score = match self.variant {
            TreapVariant::L => weight.get(),
            TreapVariant::C => treap_uniform(seed, key).ln() / weight.get(),
        };
        Ok(TreapPriority {
            score,
            tiebreak: oracle_value(seed, key, STREAM_TIEBREAK),
        })
    }

    fn encode_rank(rank: &TreapPriority, w: &mut FingerprintWriter) {
        w.f64(rank.score).u64(rank.tiebreak);
    }
}

pub type LearnedTreap = RankedTree<TreapRank>;

impl LearnedTreap {
    pub fn new(variant: TreapVariant, seed: Seed) -> Self {
        RankedTree::with_rule(TreapRank { variant }, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{DictEntry, Dictionary};

    fn entry(k: Key, f: f64) -> DictEntry {
        DictEntry::new(k, Weight::new(f).unwrap())
    }

    #[test]
    fn l_treap_puts_heavier_key_above() {
        for order in [[1u64, 2], [2, 1]] {
            let mut t = LearnedTreap::new(TreapVariant::L, Seed(0));
            for k in order {
                t.insert(entry(k, if k == 1 { 0.25 } else { 0.5 })).unwrap();
            }
            assert_eq!(t.root_key(), Some(2));
        }
    }

    #[test]
    fn c_priority_with_unit_frequency_is_the_uniform() {
        let f = Frequency::new(1.0).unwrap();
        let p = treap_priority(TreapVariant::C, f, Seed(4), 10).unwrap();
        assert_eq!(p, treap_uniform(Seed(4), 10));
        assert!(treap_priority(TreapVariant::C, Frequency::ZERO, Seed(4), 10).is_err());
        assert_eq!(
            treap_priority(TreapVariant::L, Frequency::ZERO, Seed(4), 10).unwrap(),
            0.0
        );
    }

    #[test]
    fn c_log_score_orders_like_the_power() {
        let s = Seed(12);
        for k in 1..200u64 {
            let fa = Frequency::new(0.3).unwrap();
            let fb = Frequency::new(0.05).unwrap();
            let pa = treap_priority(TreapVariant::C, fa, s, k).unwrap();
            let pb = treap_priority(TreapVariant::C, fb, s, k + 1000).unwrap();
            let rule = TreapRank {
                variant: TreapVariant::C,
            };
            let ra = rule.rank(s, k, Weight::new(0.3).unwrap()).unwrap();
            let rb = rule.rank(s, k + 1000, Weight::new(0.05).unwrap()).unwrap();
            assert_eq!(pa > pb, ra.score > rb.score);
        }
    }

    #[test]
    fn c_treap_root_probability_follows_weights() {
        let trials = 10_000u64;
        let mut a_root = 0;
        for s in 0..trials {
            let mut t = LearnedTreap::new(TreapVariant::C, Seed(s));
            t.insert(entry(1, 0.8)).unwrap();
            t.insert(entry(2, 0.2)).unwrap();
            if t.root_key() == Some(1) {
                a_root += 1;
            }
        }
        let p = a_root as f64 / trials as f64;
        assert!((p - 0.8).abs() <= 0.02, "P(root = a) = {p}");
    }

    #[test]
    fn sorted_monotone_insertion_degrades_l_treap() {
        let n = 200u64;
        let mut t = LearnedTreap::new(TreapVariant::L, Seed(1));
        for k in 1..=n {
            t.insert(entry(k, 1.0 / (k as f64 + 1.0))).unwrap();
        }
        assert_eq!(t.height(), n as usize);
        assert!(t.check_invariants().is_ok());
    }
}
