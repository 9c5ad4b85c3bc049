//! Paired dictionaries: a learned structure and a frequency-oblivious one hold
//! the same keys. A search first spends a bounded number of comparisons in the
//! learned copy and falls back to the oblivious copy when the budget runs out.
//!
//! Neither copy depends on the number of keys ever inserted, so when both are
//! uniquely represented the pair is too, with no rebuild schedule at all.

use crate::error::{Error, Result};
use crate::hi::fingerprint::{FingerprintWriter, Fingerprinted};
use crate::oracle::{ComparisonTally, Frequency, Key, Seed};
use crate::structures::{
    BoundedSearch, DictEntry, Dictionary, LearnedDictionary, Payload, SearchResult, Weight,
    ZipZipTree,
};
use crate::threshold::threshold;

/// Budget coefficient used in the experiments.
pub const GAMMA_DEFAULT: f64 = 1.0;
/// Expected-depth coefficient of a uniform zip-zip tree (`2 ln 2`).
pub const GAMMA_EXPECTED_DEPTH: f64 = 1.3863;
/// Height coefficient of a uniform zip-zip tree.
pub const GAMMA_HEIGHT: f64 = 3.82;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedConfig {
    /// Learned-side budget is `floor(gamma * log2 n)` comparisons.
    pub gamma: f64,
    /// When set, learned weights are `max(f/2, 1/(2c))` for this fixed `c`.
    /// The floor is part of the configuration, not of the history.
    pub learned_floor: Option<usize>,
}

impl Default for PairedConfig {
    fn default() -> Self {
        PairedConfig {
            gamma: GAMMA_DEFAULT,
            learned_floor: None,
        }
    }
}

impl PairedConfig {
    pub fn with_gamma(gamma: f64) -> Self {
        PairedConfig {
            gamma,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain(format!(
                "gamma {} must be positive",
                self.gamma
            )));
        }
        if self.learned_floor == Some(0) {
            return Err(Error::Domain(
                "learned floor capacity must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct PairedDict<L = ZipZipTree, F = ZipZipTree> {
    learned: L,
    fallback: F,
    config: PairedConfig,
}

impl PairedDict {
    /// Biased zip-zip learned side, uniform zip-zip fallback, independent seeds.
    pub fn zipzip(seed: Seed, config: PairedConfig) -> Result<Self> {
        PairedDict::new(
            ZipZipTree::biased(seed.child(0)),
            ZipZipTree::uniform(seed.child(1)),
            config,
        )
    }
}

impl<L: Dictionary, F: Dictionary> PairedDict<L, F> {
    pub fn new(learned: L, fallback: F, config: PairedConfig) -> Result<Self> {
        config.validate()?;
        if !learned.is_empty() || !fallback.is_empty() {
            return Err(Error::Domain("paired structure needs empty halves".into()));
        }
        Ok(PairedDict {
            learned,
            fallback,
            config,
        })
    }

    pub fn config(&self) -> PairedConfig {
        self.config
    }

    pub fn learned(&self) -> &L {
        &self.learned
    }

    pub fn fallback(&self) -> &F {
        &self.fallback
    }

    pub fn len(&self) -> usize {
        self.fallback.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Structural nodes across both halves.
    pub fn node_count(&self) -> usize {
        self.learned.node_count() + self.fallback.node_count()
    }

    /// Comparisons the learned side may spend before falling back.
    pub fn budget(&self) -> u64 {
        let n = self.len().max(2) as f64;
        ((self.config.gamma * n.log2()).floor() as u64).max(1)
    }

    fn learned_weight(&self, f: Frequency) -> Result<Weight> {
        match self.config.learned_floor {
            Some(cap) => Weight::new(threshold(f.get(), cap)?.get()),
            None => self.learned.weight_for(f),
        }
    }

    pub fn paired_insert(
        &mut self,
        key: Key,
        f: Frequency,
        payload: Option<Payload>,
    ) -> Result<()> {
        if !f.is_estimated() {
            return Err(Error::MissingEstimate(key));
        }
        if self.learned.contains(key) {
            return Err(Error::Duplicate(key));
        }
        let learned = DictEntry {
            key,
            weight: self.learned_weight(f)?,
            payload: payload.clone(),
        };
        let fallback = DictEntry {
            key,
            weight: self.fallback.weight_for(f)?,
            payload,
        };
        self.learned.insert(learned)?;
        if let Err(e) = self.fallback.insert(fallback) {
            self.learned
                .delete(key)
                .expect("rollback of a key inserted just above");
            return Err(e);
        }
        Ok(())
    }

    pub fn paired_delete(&mut self, key: Key) -> Result<DictEntry> {
        let removed = self.learned.delete(key)?;
        match self.fallback.delete(key) {
            Ok(entry) => Ok(entry),
            Err(e) => {
                self.learned
                    .insert(removed)
                    .expect("rollback of a key deleted just above");
                Err(e)
            }
        }
    }

    pub fn paired_search(&self, key: Key) -> SearchResult {
        let budget = self.budget();
        match self.learned.search_bounded(key, budget) {
            BoundedSearch::Found {
                comparisons,
                payload,
            } => SearchResult {
                found: true,
                comparisons: ComparisonTally(comparisons),
                payload,
            },
            // the halves hold the same keys, so a miss is a miss in both
            BoundedSearch::Absent { comparisons } => SearchResult {
                found: false,
                comparisons: ComparisonTally(comparisons),
                payload: None,
            },
            BoundedSearch::Exhausted => {
                let mut r = self.fallback.search(key);
                r.comparisons += budget;
                r
            }
        }
    }

    pub fn paired_predecessor(&self, key: Key) -> Option<Key> {
        self.fallback.predecessor(key)
    }

    pub fn paired_range(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        self.fallback.range(lo, hi)
    }

    pub fn paired_range_counted(&self, lo: Key, hi: Key) -> Result<(Vec<Key>, u64)> {
        self.fallback.range_counted(lo, hi)
    }

    /// True when both halves hold exactly the same keys.
    pub fn halves_agree(&self) -> bool {
        self.learned.len() == self.fallback.len() && self.learned.keys() == self.fallback.keys()
    }
}

impl<L: Dictionary, F: Dictionary> Fingerprinted for PairedDict<L, F> {
    fn write_fingerprint(&self, w: &mut FingerprintWriter) {
        w.tag("paired").f64(self.config.gamma);
        w.u64(self.config.learned_floor.map_or(0, |c| c as u64));
        w.nested(&self.learned.fingerprint());
        w.nested(&self.fallback.fingerprint());
    }
}

impl<L: Dictionary, F: Dictionary> LearnedDictionary for PairedDict<L, F> {
    fn name(&self) -> &'static str {
        "paired"
    }

    fn insert_estimate(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        self.paired_insert(key, f, payload)
    }

    fn remove(&mut self, key: Key) -> Result<()> {
        self.paired_delete(key).map(|_| ())
    }

    fn lookup(&self, key: Key) -> SearchResult {
        self.paired_search(key)
    }

    fn predecessor_of(&self, key: Key) -> Option<Key> {
        self.paired_predecessor(key)
    }

    fn keys_in(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        self.paired_range(lo, hi)
    }

    fn count(&self) -> usize {
        self.len()
    }

    fn nodes(&self) -> usize {
        self.node_count()
    }

    fn sorted_keys(&self) -> Vec<Key> {
        self.fallback.keys()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::AvlTree;
    use crate::workloads::zipf_frequencies;

    fn freq(f: f64) -> Frequency {
        Frequency::new(f).unwrap()
    }

    fn zipf_pair(n: usize, seed: u64) -> PairedDict {
        let f = zipf_frequencies(n, 1.0).unwrap();
        let mut p = PairedDict::zipzip(Seed(seed), PairedConfig::default()).unwrap();
        for (i, &fi) in f.iter().enumerate() {
            p.paired_insert(i as Key + 1, freq(fi), None).unwrap();
        }
        p
    }

    #[test]
    fn single_insert_and_delete_to_empty() {
        let mut p = PairedDict::zipzip(Seed(1), PairedConfig::default()).unwrap();
        let empty = p.fingerprint();
        p.paired_insert(5, freq(0.3), Some(Payload::from(&b"v"[..])))
            .unwrap();
        assert_eq!(p.learned().keys(), vec![5]);
        assert_eq!(p.fallback().keys(), vec![5]);
        assert_eq!(p.node_count(), 2);
        assert_eq!(p.paired_search(5).payload.as_deref(), Some(&b"v"[..]));
        p.paired_delete(5).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.fingerprint(), empty);
    }

    #[test]
    fn node_count_is_twice_the_keys() {
        assert_eq!(zipf_pair(300, 2).node_count(), 600);
    }

    #[test]
    fn rejects_missing_estimates_and_duplicates() {
        let mut p = PairedDict::zipzip(Seed(1), PairedConfig::default()).unwrap();
        assert!(matches!(
            p.paired_insert(1, Frequency::ZERO, None),
            Err(Error::MissingEstimate(1))
        ));
        p.paired_insert(1, freq(0.5), None).unwrap();
        assert!(matches!(
            p.paired_insert(1, freq(0.5), None),
            Err(Error::Duplicate(1))
        ));
        assert!(matches!(p.paired_delete(2), Err(Error::NotFound(2))));
        assert!(p.halves_agree());
        assert!(PairedDict::zipzip(Seed(1), PairedConfig::with_gamma(0.0)).is_err());
    }

    #[test]
    fn failed_fallback_insert_rolls_back() {
        let mut fallback = AvlTree::new();
        fallback.insert(DictEntry::new(7, Weight::ONE)).unwrap();
        // a non-empty half is refused up front
        assert!(PairedDict::new(
            ZipZipTree::biased(Seed(1)),
            fallback,
            PairedConfig::default()
        )
        .is_err());

        let mut p = PairedDict::new(
            ZipZipTree::biased(Seed(1)),
            AvlTree::new(),
            PairedConfig::default(),
        )
        .unwrap();
        p.paired_insert(1, freq(0.2), None).unwrap();
        let before = p.fingerprint();
        // sneak a key into the fallback only, then try to pair-insert it
        p.fallback.insert(DictEntry::new(9, Weight::ONE)).unwrap();
        assert!(p.paired_insert(9, freq(0.1), None).is_err());
        assert!(!p.learned().contains(9));
        p.fallback.delete(9).unwrap();
        assert_eq!(p.fingerprint(), before);
    }

    #[test]
    fn budget_matches_floor_of_gamma_log() {
        let p = zipf_pair(1024, 3);
        assert_eq!(p.budget(), 10);
        let empty = PairedDict::zipzip(Seed(1), PairedConfig::default()).unwrap();
        assert_eq!(empty.budget(), 1);
        let mut wide = PairedDict::zipzip(Seed(1), PairedConfig::with_gamma(GAMMA_HEIGHT)).unwrap();
        for k in 1..=1024 {
            wide.paired_insert(k, freq(1.0 / 1024.0), None).unwrap();
        }
        assert_eq!(wide.budget(), 38);
    }

    #[test]
    fn search_cost_is_learned_depth_or_budget_plus_fallback() {
        let p = zipf_pair(1024, 4);
        let budget = p.budget();
        let mut fell_back = 0;
        for k in 1..=1024 {
            let learned = p.learned().search(k).comparisons.get();
            let fallback = p.fallback().search(k).comparisons.get();
            let expected = if learned <= budget {
                learned
            } else {
                fell_back += 1;
                budget + fallback
            };
            let r = p.paired_search(k);
            assert!(r.found);
            assert_eq!(r.comparisons.get(), expected, "key {k}");
        }
        assert!(fell_back > 0, "the fallback path was never exercised");
        assert!(!p.paired_search(5000).found);
    }

    #[test]
    fn inexact_queries_delegate_to_fallback() {
        let p = zipf_pair(200, 5);
        for q in [1, 2, 50, 199, 200, 201, 500] {
            assert_eq!(p.paired_predecessor(q), p.fallback().predecessor(q));
        }
        assert_eq!(
            p.paired_range(1, 200).unwrap(),
            (1..=200).collect::<Vec<_>>()
        );
        assert!(p.paired_range(5, 4).is_err());
    }

    #[test]
    fn range_cost_is_logarithmic_plus_output() {
        let n = 1024u64;
        let p = zipf_pair(n as usize, 6);
        let bound = |out: usize| 4.0 * ((n as f64).log2() + out as f64);
        for (lo, hi) in [(1, 1), (10, 20), (500, 900), (1, n), (n, n)] {
            let (keys, cost) = p.paired_range_counted(lo, hi).unwrap();
            assert_eq!(keys.len() as u64, hi - lo + 1);
            assert!(
                (cost as f64) <= bound(keys.len()),
                "range {lo}..{hi} cost {cost}"
            );
        }
    }
}
