//! Cutoff management for dynamically thresholded dictionaries.
//!
//! Thresholds depend on a cutoff `N` that must track the key count `n`. Two
//! update schemes are provided:
//!
//! * [`UpdateScheme::Amortized`]: square `N` when `n` reaches it, take the
//!   square root when `n` falls to `N^(1/4)`. The resulting `N` depends on the
//!   path taken to a key set, so two histories with the same contents can be
//!   told apart (see [`counterexample_trace`]).
//! * [`UpdateScheme::WeaklyHistoryIndependent`]: randomized cutoffs. At count
//!   `n >= 1` the cutoff is uniform on `{n, ..., 2n-1}` whatever sequence of
//!   operations led there, and each update rebuilds with probability `O(1/n)`.

use crate::error::{Error, Result};
use crate::hi::check::Op;
use crate::hi::fingerprint::{FingerprintWriter, Fingerprinted};
use crate::oracle::{oracle_value, unit_open, Frequency, Key, Seed, STREAM_SCHEME};
use crate::structures::{Dictionary, LearnedDictionary, Payload, SearchResult, ZipZipTree};
use crate::threshold::{ThresholdConfig, ThresholdDict};

/// Starting cutoff of the amortized scheme.
pub const AMORTIZED_INITIAL_CUTOFF: usize = 4;
/// Cutoff bookkeeping value of the randomized scheme at `n = 0`.
pub const WHI_INITIAL_CUTOFF: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CutoffState {
    pub n: usize,
    pub cutoff: usize,
}

impl CutoffState {
    pub fn new(n: usize, cutoff: usize) -> Self {
        CutoffState { n, cutoff }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RebuildDecision {
    Keep,
    Rebuild(usize),
}

impl RebuildDecision {
    pub fn rebuild(self) -> bool {
        matches!(self, RebuildDecision::Rebuild(_))
    }

    pub fn new_cutoff(self) -> Option<usize> {
        match self {
            RebuildDecision::Keep => None,
            RebuildDecision::Rebuild(n) => Some(n),
        }
    }
}

pub fn amortized_after_insert(state: CutoffState) -> RebuildDecision {
    if state.n == state.cutoff {
        RebuildDecision::Rebuild(state.cutoff.saturating_mul(state.cutoff))
    } else {
        RebuildDecision::Keep
    }
}

pub fn amortized_after_delete(state: CutoffState) -> RebuildDecision {
    let target = if state.n == 0 {
        AMORTIZED_INITIAL_CUTOFF
    } else if state.n == (state.cutoff as f64).powf(0.25).round() as usize {
        ((state.cutoff as f64).sqrt().round() as usize).max(AMORTIZED_INITIAL_CUTOFF)
    } else {
        return RebuildDecision::Keep;
    };
    if target == state.cutoff {
        RebuildDecision::Keep
    } else {
        RebuildDecision::Rebuild(target)
    }
}

/// Decision taken before inserting into a structure holding `state.n` keys.
///
/// `u` is one uniform draw in `[0, 1)`. When `N = n` the new cutoff is uniform
/// on `{n+1, ..., 2n+1}`; otherwise `[0, 1/(n+1))` selects `2n`,
/// `[1/(n+1), 2/(n+1))` selects `2n+1`, and anything else keeps `N`.
pub fn whi_before_insert(state: CutoffState, u: f64) -> RebuildDecision {
    let n = state.n;
    if n == 0 || state.cutoff <= n {
        let span = n + 1;
        let pick = ((u * span as f64) as usize).min(span - 1);
        return RebuildDecision::Rebuild(n + 1 + pick);
    }
    let p = 1.0 / (n as f64 + 1.0);
    if u < p {
        RebuildDecision::Rebuild(2 * n)
    } else if u < 2.0 * p {
        RebuildDecision::Rebuild(2 * n + 1)
    } else {
        RebuildDecision::Keep
    }
}

/// Decision taken after a deletion left `state.n` keys.
pub fn whi_after_delete(state: CutoffState, u: f64) -> RebuildDecision {
    let n = state.n;
    if n == 0 {
        return if state.cutoff == WHI_INITIAL_CUTOFF {
            RebuildDecision::Keep
        } else {
            RebuildDecision::Rebuild(WHI_INITIAL_CUTOFF)
        };
    }
    if 2 * n <= state.cutoff {
        let pick = ((u * n as f64) as usize).min(n - 1);
        RebuildDecision::Rebuild(n + pick)
    } else if u < 1.0 / n as f64 {
        RebuildDecision::Rebuild(n)
    } else {
        RebuildDecision::Keep
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UpdateScheme {
    Amortized,
    WeaklyHistoryIndependent,
}

impl UpdateScheme {
    pub fn initial_cutoff(self) -> usize {
        match self {
            UpdateScheme::Amortized => AMORTIZED_INITIAL_CUTOFF,
            UpdateScheme::WeaklyHistoryIndependent => WHI_INITIAL_CUTOFF,
        }
    }
}

/// Counters for rebuild work. Instrumentation only; not part of the fingerprint.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RebuildStats {
    pub operations: u64,
    pub rebuilds: u64,
    pub keys_moved: u64,
}

/// A threshold-wrapped dictionary whose cutoff follows an update scheme.
#[derive(Clone, Debug)]
pub struct DynamicDict<D> {
    table: ThresholdDict<D>,
    scheme: UpdateScheme,
    scheme_seed: Seed,
    draws: u64,
    stats: RebuildStats,
}

impl DynamicDict<ZipZipTree> {
    /// Biased zip-zip tree under a dynamic threshold.
    pub fn zipzip(seed: Seed, scheme: UpdateScheme, scheme_seed: Seed) -> Self {
        DynamicDict::new(ZipZipTree::biased(seed), scheme, scheme_seed)
            .expect("a fresh tree is empty")
    }
}

impl<D: Dictionary> DynamicDict<D> {
    /// `scheme_seed` drives cutoff coin flips only; structural randomness stays
    /// with the wrapped structure's own seed.
    pub fn new(inner: D, scheme: UpdateScheme, scheme_seed: Seed) -> Result<Self> {
        Ok(DynamicDict {
            table: ThresholdDict::new(inner, ThresholdConfig::dynamic(scheme.initial_cutoff()))?,
            scheme,
            scheme_seed,
            draws: 0,
            stats: RebuildStats::default(),
        })
    }

    pub fn state(&self) -> CutoffState {
        CutoffState::new(self.table.count(), self.table.capacity())
    }

    pub fn scheme(&self) -> UpdateScheme {
        self.scheme
    }

    pub fn stats(&self) -> RebuildStats {
        self.stats
    }

    pub fn table(&self) -> &ThresholdDict<D> {
        &self.table
    }

    fn draw(&mut self) -> f64 {
        let u = unit_open(oracle_value(self.scheme_seed, self.draws, STREAM_SCHEME));
        self.draws += 1;
        u
    }

    fn apply(&mut self, decision: RebuildDecision) -> Result<()> {
        if let RebuildDecision::Rebuild(cutoff) = decision {
            self.rebuild(cutoff)?;
        }
        Ok(())
    }

    /// Reconstructs the structure from scratch under `cutoff`.
    pub fn rebuild(&mut self, cutoff: usize) -> Result<()> {
        let moved = self.table.rebuild(cutoff)?;
        self.stats.rebuilds += 1;
        self.stats.keys_moved += moved as u64;
        Ok(())
    }

    pub fn insert(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        if self.table.raw_frequency(key).is_some() {
            return Err(Error::Duplicate(key));
        }
        self.stats.operations += 1;
        match self.scheme {
            UpdateScheme::WeaklyHistoryIndependent => {
                let u = self.draw();
                self.apply(whi_before_insert(self.state(), u))?;
                self.table.wrap_insert(key, f, payload)
            }
            UpdateScheme::Amortized => {
                self.table.wrap_insert(key, f, payload)?;
                self.apply(amortized_after_insert(self.state()))
            }
        }
    }

    pub fn delete(&mut self, key: Key) -> Result<()> {
        self.table.wrap_delete(key)?;
        self.stats.operations += 1;
        let decision = match self.scheme {
            UpdateScheme::WeaklyHistoryIndependent => {
                let u = self.draw();
                whi_after_delete(self.state(), u)
            }
            UpdateScheme::Amortized => amortized_after_delete(self.state()),
        };
        self.apply(decision)
    }

    pub fn search(&self, key: Key) -> SearchResult {
        self.table.wrapped_search(key)
    }
}

impl<D: Dictionary> Fingerprinted for DynamicDict<D> {
    fn write_fingerprint(&self, w: &mut FingerprintWriter) {
        w.tag(match self.scheme {
            UpdateScheme::Amortized => "dynamic-amortized",
            UpdateScheme::WeaklyHistoryIndependent => "dynamic-whi",
        });
        self.table.write_fingerprint(w);
    }
}

impl<D: Dictionary> LearnedDictionary for DynamicDict<D> {
    fn name(&self) -> &'static str {
        "dynamic-threshold"
    }

    fn insert_estimate(&mut self, key: Key, f: Frequency, payload: Option<Payload>) -> Result<()> {
        self.insert(key, f, payload)
    }

    fn remove(&mut self, key: Key) -> Result<()> {
        self.delete(key)
    }

    fn lookup(&self, key: Key) -> SearchResult {
        self.search(key)
    }

    fn predecessor_of(&self, key: Key) -> Option<Key> {
        self.table.predecessor_of(key)
    }

    fn keys_in(&self, lo: Key, hi: Key) -> Result<Vec<Key>> {
        self.table.keys_in(lo, hi)
    }

    fn count(&self) -> usize {
        self.table.count()
    }

    fn nodes(&self) -> usize {
        self.table.nodes()
    }

    fn sorted_keys(&self) -> Vec<Key> {
        self.table.sorted_keys()
    }

    fn cutoff(&self) -> Option<usize> {
        Some(self.table.capacity())
    }
}

/// Two operation sequences from the empty amortized state (`n = 0, N = 4`)
/// reaching the same keys: X inserts `N - n` keys and deletes one, Y inserts
/// one key fewer. All estimates are zero.
pub fn counterexample_ops() -> (Vec<Op>, Vec<Op>) {
    // c = N - n with n = 0
    let c = AMORTIZED_INITIAL_CUTOFF as Key;
    let mut x: Vec<Op> = (1..=c).map(|k| Op::Insert(k, Frequency::ZERO)).collect();
    x.push(Op::Delete(c));
    let y = (1..c).map(|k| Op::Insert(k, Frequency::ZERO)).collect();
    (x, y)
}

/// Runs both counterexample sequences through amortized-scheme structures.
pub fn counterexample_structures(
    seed: Seed,
) -> Result<(DynamicDict<ZipZipTree>, DynamicDict<ZipZipTree>)> {
    let (xs, ys) = counterexample_ops();
    let mut x = DynamicDict::zipzip(seed, UpdateScheme::Amortized, seed);
    let mut y = DynamicDict::zipzip(seed, UpdateScheme::Amortized, seed);
    for op in &xs {
        op.apply(&mut x)?;
    }
    for op in &ys {
        op.apply(&mut y)?;
    }
    Ok((x, y))
}

/// Final cutoff states of the two counterexample sequences.
pub fn counterexample_trace() -> (CutoffState, CutoffState) {
    let (x, y) = counterexample_structures(Seed(0)).expect("counterexample ops are valid");
    (x.state(), y.state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn st(n: usize, cutoff: usize) -> CutoffState {
        CutoffState::new(n, cutoff)
    }

    #[test]
    fn amortized_examples() {
        assert_eq!(
            amortized_after_insert(st(4, 4)),
            RebuildDecision::Rebuild(16)
        );
        assert_eq!(amortized_after_insert(st(3, 4)), RebuildDecision::Keep);
        assert_eq!(
            amortized_after_insert(st(16, 16)),
            RebuildDecision::Rebuild(256)
        );
        assert_eq!(
            amortized_after_delete(st(2, 16)),
            RebuildDecision::Rebuild(4)
        );
        assert_eq!(amortized_after_delete(st(3, 16)), RebuildDecision::Keep);
        assert_eq!(
            amortized_after_delete(st(4, 256)),
            RebuildDecision::Rebuild(16)
        );
        // shrinking never goes below the initial cutoff
        assert_eq!(amortized_after_delete(st(1, 4)), RebuildDecision::Keep);
        assert_eq!(
            amortized_after_delete(st(0, 16)),
            RebuildDecision::Rebuild(4)
        );
    }

    #[test]
    fn counterexample_states() {
        let (x, y) = counterexample_trace();
        assert_eq!(x, st(3, 16));
        assert_eq!(y, st(3, 4));
        let (dx, dy) = counterexample_structures(Seed(9)).unwrap();
        assert_eq!(dx.sorted_keys(), dy.sorted_keys());
        assert_ne!(dx.fingerprint(), dy.fingerprint());
        assert!((dx.table().stored_weight_sum() - 3.0 / 32.0).abs() < 1e-15);
        assert!((dy.table().stored_weight_sum() - 3.0 / 8.0).abs() < 1e-15);
    }

    fn histogram<F: Fn(f64) -> RebuildDecision>(f: F, samples: u64) -> HashMap<Option<usize>, u64> {
        let mut h = HashMap::new();
        for i in 0..samples {
            let u = unit_open(oracle_value(Seed(77), i, STREAM_SCHEME));
            *h.entry(f(u).new_cutoff()).or_default() += 1;
        }
        h
    }

    /// Pearson chi-square statistic against equal expected counts.
    fn chi_square_uniform(counts: &[u64], samples: u64) -> f64 {
        let e = samples as f64 / counts.len() as f64;
        counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
    }

    #[test]
    fn before_insert_full_table_is_uniform() {
        let samples = 100_000;
        let h = histogram(|u| whi_before_insert(st(8, 8), u), samples);
        assert!(h.keys().all(|k| matches!(k, Some(9..=17))));
        let counts: Vec<u64> = (9..=17)
            .map(|c| h.get(&Some(c)).copied().unwrap_or(0))
            .collect();
        // 8 degrees of freedom; the 0.999 quantile is 26.12
        assert!(chi_square_uniform(&counts, samples) < 26.12, "{counts:?}");
    }

    #[test]
    fn before_insert_branch_probabilities() {
        let samples = 100_000u64;
        let h = histogram(|u| whi_before_insert(st(8, 12), u), samples);
        let p = |k| *h.get(&k).unwrap_or(&0) as f64 / samples as f64;
        assert!((p(Some(16)) - 1.0 / 9.0).abs() < 0.005);
        assert!((p(Some(17)) - 1.0 / 9.0).abs() < 0.005);
        assert!((p(None) - 7.0 / 9.0).abs() < 0.005);
        assert_eq!(h.len(), 3);
        assert_eq!(
            whi_before_insert(st(0, 1), 0.99),
            RebuildDecision::Rebuild(1)
        );
    }

    #[test]
    fn after_delete_rules() {
        let samples = 100_000u64;
        let h = histogram(|u| whi_after_delete(st(4, 10), u), samples);
        let counts: Vec<u64> = (4..=7)
            .map(|c| h.get(&Some(c)).copied().unwrap_or(0))
            .collect();
        assert_eq!(counts.iter().sum::<u64>(), samples);
        // 3 degrees of freedom; the 0.999 quantile is 16.27
        assert!(chi_square_uniform(&counts, samples) < 16.27, "{counts:?}");

        let h = histogram(|u| whi_after_delete(st(6, 10), u), samples);
        let p6 = h[&Some(6)] as f64 / samples as f64;
        assert!((p6 - 1.0 / 6.0).abs() < 0.005);
        assert_eq!(h.len(), 2);

        assert_eq!(whi_after_delete(st(1, 2), 0.7), RebuildDecision::Rebuild(1));
        assert_eq!(whi_after_delete(st(0, 3), 0.7), RebuildDecision::Rebuild(1));
    }

    #[test]
    fn whi_range_invariant_holds_on_random_traces() {
        for s in 0..20 {
            let mut d =
                DynamicDict::zipzip(Seed(1), UpdateScheme::WeaklyHistoryIndependent, Seed(s));
            let mut present = Vec::new();
            for i in 0..2000u64 {
                let r = oracle_value(Seed(s), i, 11);
                if present.is_empty() || !r.is_multiple_of(3) {
                    let k = 10_000 + i;
                    d.insert(k, Frequency::ZERO, None).unwrap();
                    present.push(k);
                } else {
                    let k = present.swap_remove((r as usize / 3) % present.len());
                    d.delete(k).unwrap();
                }
                let CutoffState { n, cutoff } = d.state();
                assert!(n <= cutoff && cutoff < 2 * (n + 1), "n={n} N={cutoff}");
                assert!(d.table().stored_weight_sum() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn rebuild_uses_new_cutoff() {
        let mut d = DynamicDict::zipzip(Seed(1), UpdateScheme::WeaklyHistoryIndependent, Seed(2));
        d.insert(1, Frequency::ZERO, None).unwrap();
        d.rebuild(16).unwrap();
        assert_eq!(d.table().stored_weight_sum(), 1.0 / 32.0);
        let fp = d.fingerprint();
        d.rebuild(16).unwrap();
        assert_eq!(d.fingerprint(), fp);
        assert!(matches!(
            d.insert(1, Frequency::ZERO, None),
            Err(Error::Duplicate(1))
        ));
    }
}
