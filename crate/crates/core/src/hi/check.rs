use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::{oracle_value, Frequency, Key, Seed};
use crate::structures::LearnedDictionary;

use super::fingerprint::Fingerprint;

/// Maximum total-variation distance accepted between cutoff distributions.
pub const WHI_TV_THRESHOLD: f64 = 0.05;

/// Exhaustive order enumeration is used up to this universe size.
const EXHAUSTIVE_LIMIT: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Op {
    Insert(Key, Frequency),
    Delete(Key),
}

impl Op {
    pub fn apply<T: LearnedDictionary + ?Sized>(&self, target: &mut T) -> Result<()> {
        match *self {
            Op::Insert(k, f) => target.insert_estimate(k, f, None),
            Op::Delete(k) => target.remove(k),
        }
    }
}

fn run<T: LearnedDictionary>(target: &mut T, ops: &[Op]) -> Result<()> {
    ops.iter().try_for_each(|op| op.apply(target))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HiMode {
    Strong,
    Weak,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HiReport {
    pub mode: HiMode,
    pub trials: usize,
    pub mismatches: usize,
    pub tv_distance: Option<f64>,
}

impl HiReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.tv_distance.is_none_or(|tv| tv <= WHI_TV_THRESHOLD)
    }

    /// One machine-readable line.
    pub fn summary_line(&self) -> String {
        let mode = match self.mode {
            HiMode::Strong => "strong",
            HiMode::Weak => "weak",
        };
        let tv = self
            .tv_distance
            .map_or_else(|| "na".to_string(), |tv| format!("{tv:.4}"));
        format!(
            "hi mode={mode} trials={} mismatches={} tv={tv} pass={}",
            self.trials,
            self.mismatches,
            self.passed()
        )
    }
}

impl fmt::Display for HiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary_line())
    }
}

/// Deterministic positive estimate for probe key `k` in a universe of `size`
/// keys; estimates over the whole universe sum to at most one.
pub fn probe_frequency(k: Key, size: usize) -> Frequency {
    let spread = 1 + oracle_value(Seed(0x0b5e_55ed), k, 9) % 1000;
    Frequency::new(spread as f64 / (1000.0 * size.max(1) as f64)).expect("at most 1/size")
}

fn build<T, F>(factory: &F, ops: &[Op]) -> Result<(Vec<Key>, Fingerprint)>
where
    F: Fn() -> T,
    T: LearnedDictionary,
{
    let mut t = factory();
    run(&mut t, ops)?;
    Ok((t.sorted_keys(), t.fingerprint()))
}

fn inserts(keys: &[Key], size: usize) -> Vec<Op> {
    keys.iter()
        .map(|&k| Op::Insert(k, probe_frequency(k, size)))
        .collect()
}

/// Calls `visit` with every permutation of `items` (Heap's algorithm).
fn for_each_permutation<F: FnMut(&[Key]) -> Result<()>>(
    items: &mut [Key],
    mut visit: F,
) -> Result<()> {
    let n = items.len();
    let mut c = vec![0usize; n];
    visit(items)?;
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            visit(items)?;
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(())
}

/// A random history reaching exactly `target`, with detours: extra keys from
/// `spare` inserted then deleted, and target keys deleted then reinserted.
fn detoured_history(target: &[Key], spare: &[Key], size: usize, rng: &mut ChaCha8Rng) -> Vec<Op> {
    let mut pending: Vec<Key> = target.to_vec();
    pending.shuffle(rng);
    let mut extras: Vec<Key> = spare.to_vec();
    extras.shuffle(rng);
    extras.truncate(rng.gen_range(0..=target.len().max(1).min(spare.len())));
    let mut live_extras: Vec<Key> = Vec::new();
    let mut live_targets: Vec<Key> = Vec::new();
    let mut reinserts = target.len() / 2;
    let mut ops = Vec::new();
    let insert = |k: Key| Op::Insert(k, probe_frequency(k, size));
    while !pending.is_empty() || !extras.is_empty() || !live_extras.is_empty() {
        match rng.gen_range(0..5) {
            0 if !extras.is_empty() => {
                let k = extras.pop().unwrap();
                ops.push(insert(k));
                live_extras.push(k);
            }
            1 if !live_extras.is_empty() => {
                let i = rng.gen_range(0..live_extras.len());
                ops.push(Op::Delete(live_extras.swap_remove(i)));
            }
            2 if reinserts > 0 && !live_targets.is_empty() => {
                reinserts -= 1;
                let i = rng.gen_range(0..live_targets.len());
                let k = live_targets.swap_remove(i);
                ops.push(Op::Delete(k));
                let at = rng.gen_range(0..=pending.len());
                pending.insert(at, k);
            }
            _ => {
                if let Some(k) = pending.pop() {
                    ops.push(insert(k));
                    live_targets.push(k);
                } else if let Some(k) = live_extras.pop() {
                    ops.push(Op::Delete(k));
                } else if let Some(k) = extras.pop() {
                    ops.push(insert(k));
                    live_extras.push(k);
                }
            }
        }
    }
    ops
}

/// Strong history independence check.
///
/// For `universe_size <= 6`, every insertion order of every non-empty subset
/// of `1..=universe_size` is compared against the sorted-order build. Then
/// `trials` randomized pairs of histories are compared: a shuffled insertion
/// order against a history with insert/delete detours, both reaching the same
/// random subset.
pub fn shi_check<T, F>(
    factory: F,
    universe_size: usize,
    trials: usize,
    seed: Seed,
) -> Result<HiReport>
where
    F: Fn() -> T,
    T: LearnedDictionary,
{
    if universe_size == 0 {
        return Err(Error::Domain("universe must hold at least one key".into()));
    }
    let mut report = HiReport {
        mode: HiMode::Strong,
        trials: 0,
        mismatches: 0,
        tv_distance: None,
    };
    let size = universe_size;
    let universe: Vec<Key> = (1..=size as Key).collect();

    if size <= EXHAUSTIVE_LIMIT {
        for mask in 1u32..(1 << size) {
            let subset: Vec<Key> = universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &k)| k)
                .collect();
            let (_, reference) = build(&factory, &inserts(&subset, size))?;
            let mut order = subset.clone();
            for_each_permutation(&mut order, |perm| {
                let (keys, fp) = build(&factory, &inserts(perm, size))?;
                debug_assert_eq!(keys, subset);
                report.trials += 1;
                if fp != reference {
                    report.mismatches += 1;
                }
                Ok(())
            })?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    for _ in 0..trials {
        let target_len = rng.gen_range(0..=size);
        let mut shuffled = universe.clone();
        shuffled.shuffle(&mut rng);
        let (target, spare) = shuffled.split_at(target_len);
        let mut plain_order = target.to_vec();
        plain_order.shuffle(&mut rng);
        let (keys_a, fp_a) = build(&factory, &inserts(&plain_order, size))?;
        let history = detoured_history(target, spare, size, &mut rng);
        let (keys_b, fp_b) = build(&factory, &history)?;
        if keys_a != keys_b {
            return Err(Error::Domain("histories reached different contents".into()));
        }
        report.trials += 1;
        if fp_a != fp_b {
            report.mismatches += 1;
        }
    }
    Ok(report)
}

/// Compares the representations left by two specific histories.
pub fn shi_compare<T, F>(factory: F, x: &[Op], y: &[Op]) -> Result<HiReport>
where
    F: Fn() -> T,
    T: LearnedDictionary,
{
    let (kx, fx) = build(&factory, x)?;
    let (ky, fy) = build(&factory, y)?;
    if kx != ky {
        return Err(Error::Domain("histories reached different contents".into()));
    }
    Ok(HiReport {
        mode: HiMode::Strong,
        trials: 1,
        mismatches: usize::from(fx != fy),
        tv_distance: None,
    })
}

/// A named operation sequence starting from the empty state.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub name: String,
    pub ops: Vec<Op>,
}

impl Strategy {
    pub fn new(name: impl Into<String>, ops: Vec<Op>) -> Self {
        Strategy {
            name: name.into(),
            ops,
        }
    }
}

/// Inserts `1..=n` in order.
pub fn insert_only_strategy(n: usize) -> Strategy {
    let keys: Vec<Key> = (1..=n as Key).collect();
    Strategy::new("insert-only", inserts(&keys, n + 8))
}

/// Inserts `1..=n` with `detours` extra keys `n+1..` spliced in, each deleted
/// again right after the next regular insert. Ends with the same contents as
/// [`insert_only_strategy`].
pub fn detour_strategy(n: usize, detours: usize) -> Strategy {
    let size = n + 8;
    let insert = |k: Key| Op::Insert(k, probe_frequency(k, size));
    let mut ops = Vec::new();
    let mut pending_delete: Option<Key> = None;
    let mut next_extra = 0usize;
    for i in 1..=n {
        ops.push(insert(i as Key));
        if let Some(k) = pending_delete.take() {
            ops.push(Op::Delete(k));
        }
        if next_extra < detours && i * (detours + 1) >= (next_extra + 1) * n {
            let k = (n + 1 + next_extra) as Key;
            next_extra += 1;
            ops.push(insert(k));
            pending_delete = Some(k);
        }
    }
    if let Some(k) = pending_delete {
        ops.push(Op::Delete(k));
    }
    while next_extra < detours {
        let k = (n + 1 + next_extra) as Key;
        next_extra += 1;
        ops.push(insert(k));
        ops.push(Op::Delete(k));
    }
    Strategy::new(format!("detour-{detours}"), ops)
}

fn total_variation(a: &BTreeMap<Option<usize>, usize>, b: &BTreeMap<Option<usize>, usize>) -> f64 {
    let na: usize = a.values().sum();
    let nb: usize = b.values().sum();
    let support: BTreeSet<_> = a.keys().chain(b.keys()).collect();
    support
        .into_iter()
        .map(|k| {
            let pa = a.get(k).copied().unwrap_or(0) as f64 / na as f64;
            let pb = b.get(k).copied().unwrap_or(0) as f64 / nb as f64;
            (pa - pb).abs()
        })
        .sum::<f64>()
        / 2.0
}

/// Weak history independence check.
///
/// Each strategy is replayed `samples` times, every replay with fresh
/// scheme randomness (`factory` receives the scheme seed; structural seeds
/// stay fixed inside the factory). The reported distance is the largest
/// pairwise total-variation distance between the strategies' cutoff
/// distributions. Mismatches count replays whose fingerprint differs from an
/// earlier replay with the same cutoff, i.e. representation not determined by
/// contents and cutoff alone.
pub fn whi_check<T, F>(
    factory: F,
    target_n: usize,
    samples: usize,
    strategies: &[Strategy],
    seed: Seed,
) -> Result<HiReport>
where
    F: Fn(Seed) -> T,
    T: LearnedDictionary,
{
    if strategies.len() < 2 {
        return Err(Error::Domain(
            "weak HI needs at least two strategies".into(),
        ));
    }
    if samples == 0 {
        return Err(Error::Domain("weak HI needs at least one sample".into()));
    }
    let mut histograms = Vec::with_capacity(strategies.len());
    let mut by_cutoff: HashMap<Option<usize>, Fingerprint> = HashMap::new();
    let mut contents: Option<Vec<Key>> = None;
    let mut mismatches = 0;
    for (si, strategy) in strategies.iter().enumerate() {
        let mut hist = BTreeMap::new();
        for i in 0..samples {
            let scheme_seed = seed.child(((si as u64) << 40) | i as u64);
            let mut t = factory(scheme_seed);
            run(&mut t, &strategy.ops)?;
            let keys = t.sorted_keys();
            if keys.len() != target_n {
                return Err(Error::Domain(format!(
                    "strategy `{}` ends with {} keys, expected {target_n}",
                    strategy.name,
                    keys.len()
                )));
            }
            match &contents {
                None => contents = Some(keys),
                Some(c) if *c != keys => {
                    return Err(Error::Domain(format!(
                        "strategy `{}` ends with different contents",
                        strategy.name
                    )))
                }
                Some(_) => {}
            }
            let cutoff = t.cutoff();
            *hist.entry(cutoff).or_insert(0usize) += 1;
            let fp = t.fingerprint();
            match by_cutoff.get(&cutoff) {
                Some(seen) if *seen != fp => mismatches += 1,
                Some(_) => {}
                None => {
                    by_cutoff.insert(cutoff, fp);
                }
            }
        }
        histograms.push(hist);
    }
    let mut tv: f64 = 0.0;
    for i in 0..histograms.len() {
        for j in i + 1..histograms.len() {
            tv = tv.max(total_variation(&histograms[i], &histograms[j]));
        }
    }
    Ok(HiReport {
        mode: HiMode::Weak,
        trials: samples * strategies.len(),
        mismatches,
        tv_distance: Some(tv),
    })
}

/// Replays one strategy as two independent sample sets: the statistical
/// noise floor of [`whi_check`] at this sample size.
pub fn whi_self_check<T, F>(
    factory: F,
    target_n: usize,
    samples: usize,
    strategy: &Strategy,
    seed: Seed,
) -> Result<HiReport>
where
    F: Fn(Seed) -> T,
    T: LearnedDictionary,
{
    let twins = [strategy.clone(), strategy.clone()];
    whi_check(factory, target_n, samples, &twins, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{counterexample_ops, DynamicDict, UpdateScheme};
    use crate::structures::{Plain, ZipZipTree};

    #[test]
    fn permutations_are_all_visited() {
        let mut items = vec![1, 2, 3, 4];
        let mut seen = BTreeSet::new();
        for_each_permutation(&mut items, |p| {
            seen.insert(p.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn detour_strategy_reaches_insert_only_contents() {
        for (n, k) in [(5, 1), (5, 3), (16, 3), (1, 2)] {
            let mut a = Plain(ZipZipTree::uniform(Seed(1)));
            run(&mut a, &insert_only_strategy(n).ops).unwrap();
            let mut b = Plain(ZipZipTree::uniform(Seed(1)));
            let s = detour_strategy(n, k);
            run(&mut b, &s.ops).unwrap();
            assert_eq!(a.sorted_keys(), b.sorted_keys());
            let deletes = s
                .ops
                .iter()
                .filter(|op| matches!(op, Op::Delete(_)))
                .count();
            assert_eq!(deletes, k);
        }
    }

    #[test]
    fn detoured_histories_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let target: Vec<Key> = (1..=10).collect();
            let spare: Vec<Key> = (11..=20).collect();
            let ops = detoured_history(&target, &spare, 20, &mut rng);
            let mut t = Plain(ZipZipTree::uniform(Seed(1)));
            run(&mut t, &ops).unwrap();
            assert_eq!(t.sorted_keys(), target);
        }
    }

    #[test]
    fn zipzip_is_strongly_hi_exhaustively() {
        let r = shi_check(|| Plain(ZipZipTree::biased(Seed(21))), 5, 50, Seed(1)).unwrap();
        assert_eq!(r.mismatches, 0);
        assert!(r.trials > 300);
    }

    #[test]
    fn amortized_counterexample_is_caught() {
        let (x, y) = counterexample_ops();
        let r = shi_compare(
            || DynamicDict::zipzip(Seed(1), UpdateScheme::Amortized, Seed(2)),
            &x,
            &y,
        )
        .unwrap();
        assert_eq!(r.mismatches, 1);
        assert!(!r.passed());
    }

    #[test]
    fn whi_needs_two_strategies() {
        let s = insert_only_strategy(4);
        let f = |sd| DynamicDict::zipzip(Seed(1), UpdateScheme::WeaklyHistoryIndependent, sd);
        assert!(whi_check(f, 4, 10, &[s], Seed(0)).is_err());
    }

    #[test]
    fn self_comparison_sits_under_noise_floor() {
        let f = |sd| DynamicDict::zipzip(Seed(1), UpdateScheme::WeaklyHistoryIndependent, sd);
        let r = whi_self_check(f, 5, 10_000, &insert_only_strategy(5), Seed(3)).unwrap();
        assert!(r.tv_distance.unwrap() <= 0.02, "{r}");
        assert_eq!(r.mismatches, 0);
    }

    #[test]
    fn amortized_split_is_total() {
        let (x, y) = counterexample_ops();
        let strategies = [Strategy::new("X", x), Strategy::new("Y", y)];
        let f = |sd| DynamicDict::zipzip(Seed(1), UpdateScheme::Amortized, sd);
        let r = whi_check(f, 3, 200, &strategies, Seed(0)).unwrap();
        assert_eq!(r.tv_distance, Some(1.0));
    }

    #[test]
    fn report_line_is_parseable() {
        let r = HiReport {
            mode: HiMode::Weak,
            trials: 10,
            mismatches: 0,
            tv_distance: Some(0.0123),
        };
        assert_eq!(
            r.summary_line(),
            "hi mode=weak trials=10 mismatches=0 tv=0.0123 pass=true"
        );
    }
}
