//! Comparison-count experiments over every structure, with CSV and SVG output.
//!
//! Each trial samples one query stream from the true frequencies and replays
//! it against every structure built from the (possibly noisy) insertion
//! frequencies. Searches are deterministic, so each distinct key is costed
//! once and weighted by how often it was queried.

mod svg;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::oracle::{Frequency, Key, Seed};
use crate::pairing::{PairedConfig, PairedDict, GAMMA_DEFAULT};
use crate::structures::{
    AvlTree, LearnedDictionary, LearnedTreap, Plain, TreapVariant, ZipZipTree,
};
use crate::threshold::{ThresholdConfig, ThresholdDict};
use crate::workloads::{
    assigned_frequencies, inverse_power_frequencies, sample_queries, zipf_frequencies,
    DEFAULT_QUERIES,
};

pub use svg::{emit_svg, render_svg, Chart};

pub const CSV_HEADER: &str =
    "test,structure,n,alpha,delta,gamma,seed,queries,avg_comparisons,max_comparisons,nodes";

pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_N_VALUES: [usize; 4] = [250, 500, 1000, 2000];
pub const DEFAULT_ALPHAS: [f64; 3] = [1.0, 2.0, 3.0];

const QUERY_STREAM: u64 = 0x5155;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StructureKind {
    Avl,
    ZipZip,
    BiasedZipZip,
    ThresholdZipZip,
    PairedZipZip,
    LTreap,
    CTreap,
}

impl StructureKind {
    pub const ALL: [StructureKind; 7] = [
        StructureKind::Avl,
        StructureKind::ZipZip,
        StructureKind::BiasedZipZip,
        StructureKind::ThresholdZipZip,
        StructureKind::PairedZipZip,
        StructureKind::LTreap,
        StructureKind::CTreap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StructureKind::Avl => "avl",
            StructureKind::ZipZip => "zipzip",
            StructureKind::BiasedZipZip => "biased-zipzip",
            StructureKind::ThresholdZipZip => "threshold-zipzip",
            StructureKind::PairedZipZip => "paired-zipzip",
            StructureKind::LTreap => "l-treap",
            StructureKind::CTreap => "c-treap",
        }
    }

    /// Uses frequency estimates at all.
    pub fn is_learned(self) -> bool {
        !matches!(self, StructureKind::Avl | StructureKind::ZipZip)
    }

    /// False for learned structures with no protection against bad estimates.
    pub fn is_robust(self) -> bool {
        !matches!(
            self,
            StructureKind::BiasedZipZip | StructureKind::LTreap | StructureKind::CTreap
        )
    }

    /// An empty instance sized for `n` keys.
    pub fn build(self, seed: Seed, n: usize, gamma: f64) -> Result<Box<dyn LearnedDictionary>> {
        Ok(match self {
            StructureKind::Avl => Box::new(Plain(AvlTree::new())),
            StructureKind::ZipZip => Box::new(Plain(ZipZipTree::uniform(seed))),
            StructureKind::BiasedZipZip => Box::new(Plain(ZipZipTree::biased(seed))),
            StructureKind::ThresholdZipZip => Box::new(ThresholdDict::new(
                ZipZipTree::biased(seed),
                ThresholdConfig::fixed(n.max(1)),
            )?),
            StructureKind::PairedZipZip => {
                Box::new(PairedDict::zipzip(seed, PairedConfig::with_gamma(gamma))?)
            }
            StructureKind::LTreap => Box::new(Plain(LearnedTreap::new(TreapVariant::L, seed))),
            StructureKind::CTreap => Box::new(Plain(LearnedTreap::new(TreapVariant::C, seed))),
        })
    }

    /// Parses a comma-separated list, rejecting unknown names.
    pub fn parse_list(list: &str) -> Result<Vec<StructureKind>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StructureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownStructure(s.to_string()))
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    ZipfParam,
    NoisyZipf,
    InversePower,
    Size,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::ZipfParam => "zipf-param",
            Experiment::NoisyZipf => "noisy-zipf",
            Experiment::InversePower => "inverse-power",
            Experiment::Size => "size",
        }
    }
}

/// One (structure, configuration, trial) measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub test: String,
    pub structure: String,
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
    pub seed: u64,
    pub queries: usize,
    pub avg_comparisons: f64,
    pub max_comparisons: u64,
    pub nodes: usize,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.4},{:.4},{:.4},{},{},{:.4},{},{}",
            self.test,
            self.structure,
            self.n,
            self.alpha,
            self.delta,
            self.gamma,
            self.seed,
            self.queries,
            self.avg_comparisons,
            self.max_comparisons,
            self.nodes
        )
    }
}

/// Trials of one configuration folded together: the mean of the per-trial
/// averages and the max of the per-trial maxima.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub test: String,
    pub structure: String,
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub trials: usize,
    pub avg_comparisons: f64,
    pub max_comparisons: u64,
    pub nodes: usize,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<Summary> {
    let mut out: Vec<Summary> = Vec::new();
    for row in rows {
        let same = |s: &Summary| {
            s.test == row.test
                && s.structure == row.structure
                && s.n == row.n
                && s.alpha == row.alpha
                && s.delta == row.delta
        };
        match out.iter_mut().find(|s| same(s)) {
            Some(s) => {
                s.avg_comparisons += row.avg_comparisons;
                s.max_comparisons = s.max_comparisons.max(row.max_comparisons);
                s.nodes = s.nodes.max(row.nodes);
                s.trials += 1;
            }
            None => out.push(Summary {
                test: row.test.clone(),
                structure: row.structure.clone(),
                n: row.n,
                alpha: row.alpha,
                delta: row.delta,
                trials: 1,
                avg_comparisons: row.avg_comparisons,
                max_comparisons: row.max_comparisons,
                nodes: row.nodes,
            }),
        }
    }
    for s in &mut out {
        s.avg_comparisons /= s.trials as f64;
    }
    out
}

/// Finds the summary for one structure at one `n` (and optionally `alpha`).
pub fn lookup(
    summaries: &[Summary],
    structure: StructureKind,
    n: usize,
    alpha: Option<f64>,
) -> Option<&Summary> {
    summaries
        .iter()
        .find(|s| s.structure == structure.name() && s.n == n && alpha.is_none_or(|a| s.alpha == a))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOptions {
    pub structures: Vec<StructureKind>,
    pub queries: usize,
    pub trials: usize,
    pub seed: Seed,
    pub gamma: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            structures: StructureKind::ALL.to_vec(),
            queries: DEFAULT_QUERIES,
            trials: DEFAULT_TRIALS,
            seed: Seed(0),
            gamma: GAMMA_DEFAULT,
        }
    }
}

impl BenchOptions {
    fn validate(&self) -> Result<()> {
        if self.structures.is_empty() {
            return Err(Error::Domain("no structures selected".into()));
        }
        if self.trials == 0 || self.queries == 0 {
            return Err(Error::Domain("trials and queries must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum Dist {
    Zipf,
    InversePower,
}

fn config_seed(master: Seed, parts: &[u64]) -> Seed {
    parts.iter().fold(master, |s, &p| s.child(p))
}

/// Runs every structure against one workload configuration.
fn measure(
    test: Experiment,
    dist: Dist,
    n: usize,
    alpha: f64,
    delta: f64,
    opts: &BenchOptions,
) -> Result<Vec<BenchRow>> {
    let base = match dist {
        Dist::Zipf => zipf_frequencies(n, alpha)?,
        Dist::InversePower => inverse_power_frequencies(n, alpha)?,
    };
    let assigned = assigned_frequencies(&base, delta)?;
    let config = [n as u64, alpha.to_bits(), delta.to_bits()];

    let mut rows = Vec::new();
    for trial in 0..opts.trials as u64 {
        let query_seed = config_seed(
            opts.seed,
            &[QUERY_STREAM, config[0], config[1], config[2], trial],
        );
        let mut hits = vec![0u64; n];
        for k in sample_queries(&base, opts.queries, query_seed)? {
            hits[k as usize - 1] += 1;
        }

        for &kind in &opts.structures {
            let seed = config_seed(
                opts.seed,
                &[kind as u64 + 1, config[0], config[1], config[2], trial],
            );
            let mut dict = kind.build(seed, n, opts.gamma)?;
            for (i, &f) in assigned.iter().enumerate() {
                dict.insert_estimate(i as Key + 1, Frequency::new(f)?, None)?;
            }

            let mut total = 0u64;
            let mut max = 0u64;
            for (i, &count) in hits.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let result = dict.lookup(i as Key + 1);
                debug_assert!(result.found);
                let cost = result.comparisons.get();
                total += cost * count;
                max = max.max(cost);
            }
            rows.push(BenchRow {
                test: test.name().to_string(),
                structure: kind.name().to_string(),
                n,
                alpha,
                delta,
                gamma: gamma_column(kind, opts.gamma),
                seed: seed.0,
                queries: opts.queries,
                avg_comparisons: total as f64 / opts.queries as f64,
                max_comparisons: max,
                nodes: dict.nodes(),
            });
        }
    }
    Ok(rows)
}

fn gamma_column(kind: StructureKind, gamma: f64) -> f64 {
    if kind == StructureKind::PairedZipZip {
        gamma
    } else {
        0.0
    }
}

fn sorted(mut rows: Vec<BenchRow>, opts: &BenchOptions) -> Vec<BenchRow> {
    let position = |name: &str| opts.structures.iter().position(|k| k.name() == name);
    rows.sort_by(|a, b| {
        position(&a.structure)
            .cmp(&position(&b.structure))
            .then(a.n.cmp(&b.n))
            .then(a.alpha.total_cmp(&b.alpha))
            .then(a.delta.total_cmp(&b.delta))
    });
    rows
}

/// Exact frequencies (`delta = 0`) at fixed `n`, sweeping the Zipf exponent.
pub fn run_zipf_param(opts: &BenchOptions, alphas: &[f64], n: usize) -> Result<Vec<BenchRow>> {
    opts.validate()?;
    if let Some(a) = alphas.iter().find(|a| !(1.0..=4.0).contains(*a)) {
        return Err(Error::Domain(format!("Zipf parameter {a} outside [1, 4]")));
    }
    let mut rows = Vec::new();
    for &alpha in alphas {
        rows.extend(measure(
            Experiment::ZipfParam,
            Dist::Zipf,
            n,
            alpha,
            0.0,
            opts,
        )?);
    }
    Ok(sorted(rows, opts))
}

/// Zipf queries with adversarially permuted insertion frequencies.
pub fn run_noisy_zipf(
    opts: &BenchOptions,
    n_values: &[usize],
    alpha: f64,
    delta: f64,
) -> Result<Vec<BenchRow>> {
    opts.validate()?;
    let mut rows = Vec::new();
    for &n in n_values {
        rows.extend(measure(
            Experiment::NoisyZipf,
            Dist::Zipf,
            n,
            alpha,
            delta,
            opts,
        )?);
    }
    Ok(sorted(rows, opts))
}

/// Exponentially decaying frequencies with adversarial noise.
pub fn run_inverse_power(
    opts: &BenchOptions,
    n_values: &[usize],
    alpha: f64,
    delta: f64,
) -> Result<Vec<BenchRow>> {
    opts.validate()?;
    let mut rows = Vec::new();
    for &n in n_values {
        rows.extend(measure(
            Experiment::InversePower,
            Dist::InversePower,
            n,
            alpha,
            delta,
            opts,
        )?);
    }
    Ok(sorted(rows, opts))
}

/// Node counts after inserting `n` keys with Zipf(2) estimates. No queries.
pub fn run_size(opts: &BenchOptions, n_values: &[usize]) -> Result<Vec<BenchRow>> {
    if opts.structures.is_empty() {
        return Err(Error::Domain("no structures selected".into()));
    }
    let alpha = 2.0;
    let mut rows = Vec::new();
    for &kind in &opts.structures {
        for &n in n_values {
            let seed = config_seed(opts.seed, &[kind as u64 + 1, n as u64]);
            let mut dict = kind.build(seed, n, opts.gamma)?;
            if n > 0 {
                for (i, f) in zipf_frequencies(n, alpha)?.into_iter().enumerate() {
                    dict.insert_estimate(i as Key + 1, Frequency::new(f)?, None)?;
                }
            }
            rows.push(BenchRow {
                test: Experiment::Size.name().to_string(),
                structure: kind.name().to_string(),
                n,
                alpha,
                delta: 0.0,
                gamma: gamma_column(kind, opts.gamma),
                seed: seed.0,
                queries: 0,
                avg_comparisons: 0.0,
                max_comparisons: 0,
                nodes: dict.nodes(),
            });
        }
    }
    Ok(rows)
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn emit_csv(rows: &[BenchRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Domain("no rows to write".into()));
    }
    fs::write(path, render_csv(rows)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
