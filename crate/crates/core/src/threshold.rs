//! Threshold frequency scheme.
//!
//! Every raw estimate `f` is replaced by `max(f/2, 1/(2n))` before it reaches
//! the wrapped structure. At most `n` keys can each gain at most `1/(2n)`, so
//! weights that summed to at most one still do, and no key's weight drops
//! below `1/(2n)`: a consistent structure keeps its `O(log 1/f)` bound while
//! every search is capped at `O(log n)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::hi::fingerprint::{FingerprintWriter, Fingerprinted};
use crate::oracle::{Frequency, Key};
use crate::structures::{DictEntry, Dictionary, LearnedDictionary, Payload, SearchResult, Weight};

/// Slack allowed on weight sums for floating-point accumulation.
pub const SUM_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdMode {
    /// `capacity` is the known final key count; exceeding it is an error.
    Static,
    /// `capacity` is the cutoff `N`, maintained by an update scheme.
    Dynamic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThresholdConfig {
    pub capacity: usize,
    pub mode: ThresholdMode,
}

impl ThresholdConfig {
    pub fn fixed(capacity: usize) -> Self {
        ThresholdConfig {
            capacity,
            mode: ThresholdMode::Static,
        }
    }

    pub fn dynamic(cutoff: usize) -> Self {
        ThresholdConfig {
            capacity: cutoff,
            mode: ThresholdMode::Dynamic,
        }
    }
}

/// `max(f/2, 1/(2·capacity))`.
pub fn threshold(f: f64, capacity: usize) -> Result<Frequency> {
    let f = Frequency::new(f)?;
    if capacity == 0 {
        return Err(Error::Domain(
            "threshold capacity must be at least 1".into(),
        ));
    }
    Frequency::new((f.get() / 2.0).max(1.0 / (2.0 * capacity as f64)))
}

/// Robustness wrapper around any weighted dictionary.
///
/// Raw estimates are kept next to the entries so that a change of capacity can
/// re-threshold every key exactly.
#[derive(Clone, Debug)]
pub struct ThresholdDict<D> {
    inner: D,
    config: ThresholdConfig,
    raw: BTreeMap<Key, (Frequency, Option<Payload>)>,
}

impl<D: Dictionary> ThresholdDict<D> {
    pub fn new(inner: D, config: ThresholdConfig) -> Result<Self> {
        if config.capacity == 0 {
            return Err(Error::Domain(
                "threshold capacity must be at least 1".into(),
            ));
        }
        if !inner.is_empty() {
            return Err(Error::Domain(
                "threshold wrapper needs an empty structure".into(),
            ));
        }
        Ok(ThresholdDict {
            inner,
            config,
            raw: BTreeMap::new(),
        })
    }

    pub fn config(&self) -> ThresholdConfig {
        self.config
    }

    pub fn capacity(&self) -> usize {
        self.config.capacity
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }

    pub fn raw_frequency(&self, key: Key) -> Option<Frequency> {
        self.raw.get(&key).map(|(f, _)| *f)
    }

    pub fn raw_sum(&self) -> f64 {
        self.raw.values().map(|(f, _)| f.get()).sum()
    }

    /// Sum of the weights actually stored in the wrapped structure.
    pub fn stored_weight_sum(&self) -> f64 {
        self.inner.weight_sum()
    }

    fn weight(&self, f: Frequency) -> Result<Weight> {
        Weight::new(threshold(f.get(), self.config.capacity)?.get())
    }

    pub fn wrap_insert(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        if self.raw.contains_key(&key) {
            return Err(Error::Duplicate(key));
        }
        if self.config.mode == ThresholdMode::Static && self.raw.len() >= self.config.capacity {
            return Err(Error::Capacity {
                capacity: self.config.capacity,
            });
        }
        let weight = self.weight(f)?;
        self.inner.insert(DictEntry {
            key,
            weight,
            payload: payload.clone(),
        })?;
        self.raw.insert(key, (f, payload));
        Ok(())
    }

    pub fn wrap_delete(&mut self, key: Key) -> Result<(Frequency, Option<Payload>)> {
        if !self.raw.contains_key(&key) {
            return Err(Error::NotFound(key));
        }
        self.inner.delete(key)?;
        Ok(self.raw.remove(&key).expect("raw map tracks inner keys"))
    }

    pub fn wrapped_search(&self, key: Key) -> SearchResult {
        self.inner.search(key)
    }

    /// Rebuilds from scratch under a new capacity: every key is re-thresholded
    /// and reinserted in sorted order into a fresh structure with the same seed.
    /// Returns the number of keys moved.
    pub fn rebuild(&mut self, capacity: usize) -> Result<usize> {
        if capacity == 0 {
            return Err(Error::Domain(
                "threshold capacity must be at least 1".into(),
            ));
        }
        if self.config.mode == ThresholdMode::Static && self.raw.len() > capacity {
            return Err(Error::Capacity { capacity });
        }
        self.config.capacity = capacity;
        let mut fresh = self.inner.fresh();
        for (&key, (f, payload)) in &self.raw {
            fresh.insert(DictEntry {
                key,
                weight: self.weight(*f)?,
                payload: payload.clone(),
            })?;
        }
        self.inner = fresh;
        Ok(self.raw.len())
    }
}

impl<D: Dictionary> Fingerprinted for ThresholdDict<D> {
    fn write_fingerprint(&self, w: &mut FingerprintWriter) {
        w.tag("threshold")
            .u64(match self.config.mode {
                ThresholdMode::Static => 0,
                ThresholdMode::Dynamic => 1,
            })
            .u64(self.config.capacity as u64)
            .u64(self.raw.len() as u64);
        for (&key, (f, _)) in &self.raw {
            w.u64(key).f64(f.get());
        }
        self.inner.write_fingerprint(w);
    }
}

impl<D: Dictionary> LearnedDictionary for ThresholdDict<D> {
    fn name(&self) -> &'static str {
        "threshold"
    }

    fn insert_estimate(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        self.wrap_insert(key, f, payload)
    }

    fn remove(&mut self, key: Key) -> Result<()> {
        self.wrap_delete(key).map(|_| ())
    }

    fn lookup(&self, key: Key) -> SearchResult {
        self.wrapped_search(key)
    }

    fn predecessor_of(&self, key: Key) -> Option<Key> {
        self.inner.predecessor(key)
    }

    fn keys_in(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        self.inner.range(lo, hi)
    }

    fn count(&self) -> usize {
        self.raw.len()
    }

    fn nodes(&self) -> usize {
        self.inner.node_count()
    }

    fn sorted_keys(&self) -> Vec<Key> {
        self.raw.keys().copied().collect()
    }

    fn cutoff(&self) -> Option<usize> {
        match self.config.mode {
            ThresholdMode::Static => None,
            ThresholdMode::Dynamic => Some(self.config.capacity),
        }
    }
}
