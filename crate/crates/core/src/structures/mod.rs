//! Ordered dictionaries sharing one contract: zip-zip trees (uniform and
//! biased), learned treaps, and an AVL baseline.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hi::fingerprint::Fingerprinted;
use crate::oracle::{ComparisonTally, Frequency, Key};

mod avl;
mod ranked;
mod treap;
pub(crate) mod tree;
mod zipzip;

pub use avl::AvlTree;
pub use ranked::{RankRule, RankedTree};
pub use treap::{treap_priority, LearnedTreap, TreapPriority, TreapRank, TreapVariant};
pub use zipzip::{zz_rank, RankPair, ZipZipRank, ZipZipTree};

/// Opaque value bytes. Shared by reference so paired copies hold one record.
pub type Payload = Arc<[u8]>;

/// Positive, finite node weight.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Weight(f64);

impl Weight {
    pub const ONE: Weight = Weight(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Weight(value))
        } else {
            Err(Error::Domain(format!(
                "weight {value} must be positive and finite"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct DictEntry {
    pub key: Key,
    pub weight: Weight,
    pub payload: Option<Payload>,
}

impl DictEntry {
    pub fn new(key: Key, weight: Weight) -> Self {
        DictEntry {
            key,
            weight,
            payload: None,
        }
    }

    pub fn with_payload(mut self, payload: impl Into<Payload>) -> Self {
        self.payload = Some(payload.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchResult {
    pub found: bool,
    pub comparisons: ComparisonTally,
    pub payload: Option<Payload>,
}

/// Outcome of a search that may spend at most a fixed number of comparisons.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundedSearch {
    Found {
        comparisons: u64,
        payload: Option<Payload>,
    },
    /// The descent fell off the tree: the key is definitely absent.
    Absent { comparisons: u64 },
    /// The budget ran out before the key was resolved.
    Exhausted,
}

/// The common ordered-dictionary contract.
pub trait Dictionary: Fingerprinted {
    fn name(&self) -> &'static str;

    /// Weight this structure stores for a raw frequency estimate.
    fn weight_for(&self, f: Frequency) -> Result<Weight> {
        Weight::new(f.get())
    }

    fn insert(&mut self, entry: DictEntry) -> Result<()>;

    fn delete(&mut self, key: Key) -> Result<DictEntry>;

    fn search(&self, key: Key) -> SearchResult;

    fn search_bounded(&self, key: Key, budget: u64) -> BoundedSearch;

    fn contains(&self, key: Key) -> bool;

    fn predecessor(&self, key: Key) -> Option<Key>;

    /// Keys in `[lo, hi]` together with the comparisons spent finding them.
    fn range_counted(&self, lo: Key, hi: Key) -> Result<(Vec<Key>, u64)>;

    fn range(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        self.range_counted(lo, hi).map(|(keys, _)| keys)
    }

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn node_count(&self) -> usize {
        self.len()
    }

    /// Stored keys in increasing order.
    fn keys(&self) -> Vec<Key>;

    fn height(&self) -> usize;

    /// Pre-order `(key, depth)` walk, for structural comparisons.
    fn preorder(&self) -> Vec<(Key, usize)>;

    /// Sum of stored weights.
    fn weight_sum(&self) -> f64;

    /// An empty structure with the same configuration and seed.
    fn fresh(&self) -> Self
    where
        Self: Sized;
}

/// A dictionary driven by raw frequency estimates. Implemented by the
/// threshold, paired and dynamic wrappers, and by [`Plain`] for bare trees.
pub trait LearnedDictionary: Fingerprinted {
    fn name(&self) -> &'static str;

    fn insert_estimate(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()>;

    fn remove(&mut self, key: Key) -> Result<()>;

    fn lookup(&self, key: Key) -> SearchResult;

    fn predecessor_of(&self, key: Key) -> Option<Key>;

    fn keys_in(&self, lo: Key, hi: Key) -> Result<Vec<Key>>;

    fn count(&self) -> usize;

    /// Structural nodes allocated (twice the count for paired structures).
    fn nodes(&self) -> usize;

    fn sorted_keys(&self) -> Vec<Key>;

    /// Current cutoff for dynamically thresholded structures.
    fn cutoff(&self) -> Option<usize> {
        None
    }
}

impl<T: LearnedDictionary + ?Sized> LearnedDictionary for Box<T> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn insert_estimate(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        (**self).insert_estimate(key, f, payload)
    }

    fn remove(&mut self, key: Key) -> Result<()> {
        (**self).remove(key)
    }

    fn lookup(&self, key: Key) -> SearchResult {
        (**self).lookup(key)
    }

    fn predecessor_of(&self, key: Key) -> Option<Key> {
        (**self).predecessor_of(key)
    }

    fn keys_in(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        (**self).keys_in(lo, hi)
    }

    fn count(&self) -> usize {
        (**self).count()
    }

    fn nodes(&self) -> usize {
        (**self).nodes()
    }

    fn sorted_keys(&self) -> Vec<Key> {
        (**self).sorted_keys()
    }

    fn cutoff(&self) -> Option<usize> {
        (**self).cutoff()
    }
}

/// Adapter feeding raw estimates straight into a bare structure.
#[derive(Clone, Debug)]
pub struct Plain<D>(pub D);

impl<D: Dictionary> Fingerprinted for Plain<D> {
    fn write_fingerprint(&self, w: &mut crate::hi::fingerprint::FingerprintWriter) {
        self.0.write_fingerprint(w);
    }
}

impl<D: Dictionary> LearnedDictionary for Plain<D> {
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn insert_estimate(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        let weight = self.0.weight_for(f)?;
        self.0.insert(DictEntry {
            key,
            weight,
            payload,
        })
    }

    fn remove(&mut self, key: Key) -> Result<()> {
        self.0.delete(key).map(|_| ())
    }

    fn lookup(&self, key: Key) -> SearchResult {
        self.0.search(key)
    }

    fn predecessor_of(&self, key: Key) -> Option<Key> {
        self.0.predecessor(key)
    }

    fn keys_in(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        self.0.range(lo, hi)
    }

    fn count(&self) -> usize {
        self.0.len()
    }

    fn nodes(&self) -> usize {
        self.0.node_count()
    }

    fn sorted_keys(&self) -> Vec<Key> {
        self.0.keys()
    }
}

pub(crate) fn check_range(lo: Key, hi: Key) -> Result<()> {
    if lo > hi {
        Err(Error::Domain(format!(
            "range lower bound {lo} exceeds upper bound {hi}"
        )))
    } else {
        Ok(())
    }
}
