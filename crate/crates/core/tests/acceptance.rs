//! End-to-end acceptance checks. Runs every criterion, prints one line each,
//! and exits non-zero if any failed.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use learned_hi::bench::{
    lookup, run_inverse_power, run_noisy_zipf, run_size, run_zipf_param, summarize, BenchOptions,
    StructureKind, Summary,
};
use learned_hi::dynamics::{
    counterexample_ops, counterexample_structures, DynamicDict, UpdateScheme,
};
use learned_hi::hi::{
    detour_strategy, insert_only_strategy, probe_frequency, shi_check, shi_compare, whi_check,
    Fingerprinted, Strategy,
};
use learned_hi::pairing::{PairedConfig, PairedDict};
use learned_hi::structures::{LearnedDictionary, Plain};
use learned_hi::threshold::{threshold, ThresholdConfig, ThresholdDict, SUM_SLACK};
use learned_hi::{Frequency, Key, LearnedTreap, Seed, TreapVariant, ZipZipTree};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

const MASTER: Seed = Seed(0x0acc_e971);

fn threshold_weight_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for v in 0..10_000 {
        let n = rng.gen_range(1..=2000usize);
        let mut f: Vec<f64> = match v % 4 {
            // all mass on one key
            0 => {
                let mut f = vec![0.0; n];
                f[rng.gen_range(0..n)] = 1.0;
                f
            }
            // all estimates missing
            1 => vec![0.0; n],
            // heavy-tailed
            2 => (1..=n)
                .map(|i| (i as f64).powf(-rng.gen_range(1.0..4.0)))
                .collect(),
            _ => (0..n).map(|_| rng.gen::<f64>()).collect(),
        };
        let total: f64 = f.iter().sum();
        if total > 0.0 {
            let scale = rng.gen_range(0.5..=1.0) / total;
            f.iter_mut().for_each(|x| *x = (*x * scale).min(1.0));
        }
        let sum: f64 = f.iter().map(|&x| threshold(x, n).unwrap().get()).sum();
        worst = worst.max(sum);
        if sum > 1.0 + SUM_SLACK {
            return Outcome::new(false, format!("vector {v} (n={n}) sums to {sum}"));
        }
    }
    Outcome::new(true, format!("10000 vectors, largest sum {worst:.12}"))
}

fn strong_history_independence() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, r: learned_hi::Result<learned_hi::hi::HiReport>| {
        let r = r.expect("valid histories");
        ok &= r.mismatches == 0;
        lines.push(format!("{name} {}/{}", r.mismatches, r.trials));
    };
    for size in [6usize, 128] {
        let trials = if size <= 6 { 0 } else { 1000 };
        let seed = MASTER.child(size as u64);
        check(
            &format!("zipzip@{size}"),
            shi_check(|| Plain(ZipZipTree::uniform(seed)), size, trials, seed),
        );
        check(
            &format!("threshold@{size}"),
            shi_check(
                || {
                    ThresholdDict::new(ZipZipTree::biased(seed), ThresholdConfig::fixed(size))
                        .unwrap()
                },
                size,
                trials,
                seed,
            ),
        );
        check(
            &format!("paired@{size}"),
            shi_check(
                || PairedDict::zipzip(seed, PairedConfig::default()).unwrap(),
                size,
                trials,
                seed,
            ),
        );
    }
    let (x, y) = counterexample_ops();
    let control = shi_compare(
        || DynamicDict::zipzip(MASTER, UpdateScheme::Amortized, MASTER),
        &x,
        &y,
    )
    .expect("valid histories");
    ok &= control.mismatches >= 1;
    lines.push(format!("amortized-control {}/1", control.mismatches));
    Outcome::new(ok, format!("mismatches {}", lines.join(", ")))
}

fn weak_history_independence() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [5usize, 16, 33] {
        let strategies = [
            insert_only_strategy(n),
            detour_strategy(n, 1),
            detour_strategy(n, 3),
        ];
        let structural = MASTER.child(n as u64);
        let r = whi_check(
            |s| DynamicDict::zipzip(structural, UpdateScheme::WeaklyHistoryIndependent, s),
            n,
            10_000,
            &strategies,
            MASTER.child(100 + n as u64),
        )
        .expect("valid strategies");
        let tv = r.tv_distance.unwrap();
        ok &= tv <= 0.05 && r.mismatches == 0;
        parts.push(format!("n={n} tv={tv:.4} mismatches={}", r.mismatches));
    }
    let (x, y) = counterexample_ops();
    let control = whi_check(
        |s| DynamicDict::zipzip(MASTER, UpdateScheme::Amortized, s),
        3,
        10_000,
        &[Strategy::new("X", x), Strategy::new("Y", y)],
        MASTER,
    )
    .expect("valid strategies");
    let control_tv = control.tv_distance.unwrap();
    ok &= control_tv == 1.0;
    parts.push(format!("amortized tv={control_tv:.4}"));
    Outcome::new(ok, parts.join(", "))
}

fn rebuild_rate() -> Outcome {
    let target = 1000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut dict = DynamicDict::zipzip(
        MASTER,
        UpdateScheme::WeaklyHistoryIndependent,
        MASTER.child(4),
    );
    let mut live: Vec<Key> = Vec::new();
    let mut next: Key = 1;
    let fresh_frequency =
        |rng: &mut ChaCha8Rng| Frequency::new(rng.gen_range(0.0..1.0 / 2000.0)).unwrap();
    while live.len() < target {
        let f = fresh_frequency(&mut rng);
        dict.insert(next, f, None).unwrap();
        live.push(next);
        next += 1;
    }
    let before = dict.stats();
    let ops = 100_000;
    for _ in 0..ops {
        // drift back toward the target size
        let p_insert =
            (0.5 + (target as f64 - live.len() as f64) / (2.0 * target as f64)).clamp(0.1, 0.9);
        if rng.gen_bool(p_insert) || live.is_empty() {
            let f = fresh_frequency(&mut rng);
            dict.insert(next, f, None).unwrap();
            live.push(next);
            next += 1;
        } else {
            let i = rng.gen_range(0..live.len());
            dict.delete(live.swap_remove(i)).unwrap();
        }
    }
    let after = dict.stats();
    let rebuilds = after.rebuilds - before.rebuilds;
    let moved = after.keys_moved - before.keys_moved;
    let rate = rebuilds as f64 / ops as f64;
    let moves_per_op = moved as f64 / ops as f64;
    let bound = 8.0 * (target as f64).log2();
    Outcome::new(
        rate <= 0.005 && moves_per_op <= bound,
        format!(
            "rebuild rate {rate:.5} (<= 0.005), key moves/op {moves_per_op:.2} (<= {bound:.1}), final n={}",
            live.len()
        ),
    )
}

fn counterexample() -> Outcome {
    let (x, y) = counterexample_structures(MASTER).unwrap();
    let (sx, sy) = (x.state(), y.state());
    let same_contents = x.sorted_keys() == y.sorted_keys();
    let ok =
        sx.cutoff == 16 && sy.cutoff == 4 && same_contents && x.fingerprint() != y.fingerprint();
    Outcome::new(
        ok,
        format!(
            "X: n={} N={}, Y: n={} N={}, same contents {same_contents}",
            sx.n, sx.cutoff, sy.n, sy.cutoff
        ),
    )
}

fn opts(structures: &[StructureKind], trials: usize) -> BenchOptions {
    BenchOptions {
        structures: structures.to_vec(),
        trials,
        seed: MASTER,
        ..BenchOptions::default()
    }
}

fn avg(s: &[Summary], kind: StructureKind, n: usize, alpha: Option<f64>) -> f64 {
    lookup(s, kind, n, alpha)
        .expect("configuration was run")
        .avg_comparisons
}

fn noisy_zipf() -> Outcome {
    use StructureKind::*;
    // 100 trials: the per-trial spread of the threshold tree is about 2.3
    // comparisons, so 10 trials leave a 0.7 standard error against the bound
    let rows = run_noisy_zipf(
        &opts(&[Avl, ThresholdZipZip, PairedZipZip], 100),
        &[2000],
        2.0,
        0.9,
    )
    .unwrap();
    let s = summarize(&rows);
    let (t, a, p) = (
        avg(&s, ThresholdZipZip, 2000, None),
        avg(&s, Avl, 2000, None),
        avg(&s, PairedZipZip, 2000, None),
    );
    Outcome::new(
        t < 10.0 && t < a && p <= 2.2 * t,
        format!(
            "threshold {t:.4} (< 10, < avl {a:.4}), paired {p:.4} = {:.3}x threshold (<= 2.2)",
            p / t
        ),
    )
}

fn inverse_power() -> Outcome {
    use StructureKind::*;
    let kinds = [BiasedZipZip, LTreap, CTreap, ThresholdZipZip, PairedZipZip];
    let rows = run_inverse_power(&opts(&kinds, 10), &[250, 2000], 1.01, 0.9).unwrap();
    let s = summarize(&rows);
    let ratio = |k| avg(&s, k, 2000, None) / avg(&s, k, 250, None);
    let mut ok = true;
    let mut parts = Vec::new();
    for k in kinds.into_iter().filter(|k| !k.is_robust()) {
        let r = ratio(k);
        ok &= r >= 4.0;
        parts.push(format!("{k} {r:.3} (>= 4)"));
    }
    let rt = ratio(ThresholdZipZip);
    let rp = ratio(PairedZipZip);
    ok &= rt <= 1.6 && rp <= 1.8;
    parts.push(format!("threshold-zipzip {rt:.3} (<= 1.6)"));
    parts.push(format!("paired-zipzip {rp:.3} (<= 1.8)"));
    Outcome::new(ok, format!("ratios n=2000/n=250: {}", parts.join(", ")))
}

fn zipf_parameter() -> Outcome {
    use StructureKind::*;
    let learned: Vec<StructureKind> = StructureKind::ALL
        .into_iter()
        .filter(|k| k.is_learned())
        .collect();
    let rows = run_zipf_param(&opts(&learned, 10), &[1.0, 2.0, 3.0], 2000).unwrap();
    let s = summarize(&rows);
    let mut ok = true;
    let mut parts = Vec::new();
    for &k in &learned {
        let v: Vec<f64> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&a| avg(&s, k, 2000, Some(a)))
            .collect();
        let decreasing = v.windows(2).all(|w| w[1] < w[0]);
        ok &= decreasing;
        parts.push(format!("{k} {:.3}>{:.3}>{:.3}", v[0], v[1], v[2]));
    }
    let gap = avg(&s, ThresholdZipZip, 2000, Some(2.0)) - avg(&s, BiasedZipZip, 2000, Some(2.0));
    ok &= gap <= 4.0;
    parts.push(format!("threshold-biased gap at alpha=2 {gap:.3} (<= 4)"));
    Outcome::new(ok, parts.join(", "))
}

fn size() -> Outcome {
    let rows = run_size(&opts(&StructureKind::ALL, 1), &[250, 500, 1000, 2000]).unwrap();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| {
            let expected = if r.structure == "paired-zipzip" {
                2 * r.n
            } else {
                r.n
            };
            r.nodes != expected
        })
        .map(|r| format!("{}@{}={}", r.structure, r.n, r.nodes))
        .collect();
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} rows exact", rows.len())
        } else {
            format!("wrong counts: {}", bad.join(", "))
        },
    )
}

type Criterion = fn() -> Outcome;
type Factory = fn(Seed) -> Box<dyn LearnedDictionary>;

fn unique_representation() -> Outcome {
    let factories: [(&str, Factory); 6] = [
        ("zipzip", |s| Box::new(Plain(ZipZipTree::uniform(s)))),
        ("biased-zipzip", |s| Box::new(Plain(ZipZipTree::biased(s)))),
        ("l-treap", |s| {
            Box::new(Plain(LearnedTreap::new(TreapVariant::L, s)))
        }),
        ("c-treap", |s| {
            Box::new(Plain(LearnedTreap::new(TreapVariant::C, s)))
        }),
        ("threshold-zipzip", |s| {
            Box::new(ThresholdDict::new(ZipZipTree::biased(s), ThresholdConfig::fixed(64)).unwrap())
        }),
        ("paired-zipzip", |s| {
            Box::new(PairedDict::zipzip(s, PairedConfig::default()).unwrap())
        }),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = BTreeMap::new();
    let traces = 1000;
    for t in 0..traces {
        let universe = rng.gen_range(1..=64usize);
        let seed = MASTER.child(1000 + t);
        let mut keys: Vec<Key> = (1..=universe as Key).collect();
        keys.shuffle(&mut rng);
        let steps = rng.gen_range(0..4 * universe);
        let mut ops = Vec::new();
        let mut live: Vec<Key> = Vec::new();
        let mut absent = keys.clone();
        for _ in 0..steps {
            if !absent.is_empty() && (live.is_empty() || rng.gen_bool(0.6)) {
                let k = absent.swap_remove(rng.gen_range(0..absent.len()));
                live.push(k);
                ops.push((true, k));
            } else if !live.is_empty() {
                let k = live.swap_remove(rng.gen_range(0..live.len()));
                absent.push(k);
                ops.push((false, k));
            }
        }
        live.sort_unstable();
        for (name, make) in &factories {
            let mut traced = make(seed);
            for &(insert, k) in &ops {
                if insert {
                    traced
                        .insert_estimate(k, probe_frequency(k, 64), None)
                        .unwrap();
                } else {
                    traced.remove(k).unwrap();
                }
            }
            let mut sorted = make(seed);
            for &k in &live {
                sorted
                    .insert_estimate(k, probe_frequency(k, 64), None)
                    .unwrap();
            }
            if traced.fingerprint() != sorted.fingerprint() {
                *failures.entry(*name).or_insert(0usize) += 1;
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{traces} traces x {} structures, mismatches {failures:?}",
            factories.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("threshold weight sum", threshold_weight_sum),
        ("strong history independence", strong_history_independence),
        ("weak history independence", weak_history_independence),
        ("rebuild rate", rebuild_rate),
        ("amortized counterexample", counterexample),
        ("noisy zipf", noisy_zipf),
        ("inverse power scaling", inverse_power),
        ("zipf parameter sweep", zipf_parameter),
        ("node counts", size),
        ("unique representation", unique_representation),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict} {name} [{:.1}s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
        if !outcome.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
