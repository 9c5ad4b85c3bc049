use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use learned_hi::bench::{
    emit_csv, emit_svg, render_csv, run_inverse_power, run_noisy_zipf, run_size, run_zipf_param,
    summarize, BenchOptions, BenchRow, Chart, StructureKind, DEFAULT_ALPHAS, DEFAULT_N_VALUES,
    DEFAULT_TRIALS,
};
use learned_hi::dynamics::{
    counterexample_ops, counterexample_structures, DynamicDict, UpdateScheme,
};
use learned_hi::hi::{
    detour_strategy, insert_only_strategy, shi_check, shi_compare, whi_check, Fingerprinted,
    HiReport, Strategy,
};
use learned_hi::pairing::GAMMA_DEFAULT;
use learned_hi::structures::LearnedDictionary;
use learned_hi::workloads::DEFAULT_QUERIES;
use learned_hi::{Error, Seed};

#[derive(Parser)]
#[command(
    name = "learned-hi",
    version,
    about = "History-independent learned dictionaries: benchmarks and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the comparison-count experiments.
    Bench {
        #[arg(value_enum)]
        test: BenchTest,
        #[command(flatten)]
        common: Common,
        /// Single n (overrides --n-list).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        /// Single alpha (overrides --alpha-list).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        alpha_list: Option<Vec<f64>>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = GAMMA_DEFAULT)]
        gamma: f64,
        #[arg(long, default_value_t = DEFAULT_QUERIES)]
        queries: usize,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check history independence empirically.
    Verify {
        #[arg(value_enum)]
        mode: VerifyMode,
        #[command(flatten)]
        common: Common,
        /// Universe size (strong) or target key count (weak).
        #[arg(long)]
        n: Option<usize>,
        /// Randomized trials (strong) or samples per strategy (weak).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Walk through a worked example.
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma list of structure names.
    #[arg(long)]
    structures: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchTest {
    ZipfParam,
    NoisyZipf,
    InversePower,
    Size,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Shi,
    Whi,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    Counterexample,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownStructure(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn structures(common: &Common, default: &[StructureKind]) -> Result<Vec<StructureKind>, Failure> {
    match &common.structures {
        Some(list) => Ok(StructureKind::parse_list(list)?),
        None => Ok(default.to_vec()),
    }
}

fn print_summary(rows: &[BenchRow]) {
    println!(
        "{:<16} {:>6} {:>7} {:>6} {:>10} {:>6} {:>6}",
        "structure", "n", "alpha", "delta", "avg", "max", "nodes"
    );
    for s in summarize(rows) {
        println!(
            "{:<16} {:>6} {:>7.3} {:>6.2} {:>10.4} {:>6} {:>6}",
            s.structure, s.n, s.alpha, s.delta, s.avg_comparisons, s.max_comparisons, s.nodes
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn bench(
    test: BenchTest,
    common: &Common,
    n: Option<usize>,
    n_list: Option<Vec<usize>>,
    alpha: Option<f64>,
    alpha_list: Option<Vec<f64>>,
    delta: Option<f64>,
    gamma: f64,
    queries: usize,
    trials: usize,
    csv: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<(), Failure> {
    let opts = BenchOptions {
        structures: structures(common, &StructureKind::ALL)?,
        queries,
        trials,
        seed: Seed(common.seed),
        gamma,
    };
    let n_values = n
        .map(|n| vec![n])
        .or(n_list)
        .unwrap_or_else(|| DEFAULT_N_VALUES.to_vec());
    let (rows, chart) = match test {
        BenchTest::ZipfParam => {
            let alphas = alpha
                .map(|a| vec![a])
                .or(alpha_list)
                .unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
            (
                run_zipf_param(&opts, &alphas, n.unwrap_or(2000))?,
                Chart::Bar,
            )
        }
        BenchTest::NoisyZipf => (
            run_noisy_zipf(&opts, &n_values, alpha.unwrap_or(2.0), delta.unwrap_or(0.9))?,
            Chart::Line,
        ),
        BenchTest::InversePower => (
            run_inverse_power(
                &opts,
                &n_values,
                alpha.unwrap_or(1.01),
                delta.unwrap_or(0.9),
            )?,
            Chart::Line,
        ),
        BenchTest::Size => (run_size(&opts, &n_values)?, Chart::Line),
    };
    match &csv {
        Some(path) => emit_csv(&rows, path)?,
        None => print!("{}", render_csv(&rows)),
    }
    if let Some(path) = &svg {
        emit_svg(&rows, path, chart)?;
    }
    if csv.is_some() {
        print_summary(&rows);
    }
    Ok(())
}

fn report(name: &str, r: &HiReport) -> bool {
    println!("{name:<16} {}", r.summary_line());
    r.passed()
}

fn verify(
    mode: VerifyMode,
    common: &Common,
    n: Option<usize>,
    trials: Option<usize>,
) -> Result<bool, Failure> {
    let seed = Seed(common.seed);
    match mode {
        VerifyMode::Shi => {
            let size = n.unwrap_or(6);
            let trials = trials.unwrap_or(1000);
            let kinds = structures(
                common,
                &[
                    StructureKind::ZipZip,
                    StructureKind::ThresholdZipZip,
                    StructureKind::PairedZipZip,
                ],
            )?;
            let mut all = true;
            for kind in kinds {
                let factory = || {
                    kind.build(seed, size, GAMMA_DEFAULT)
                        .expect("valid configuration")
                };
                let r = shi_check(factory, size, trials, seed.child(kind as u64))?;
                all &= report(kind.name(), &r);
            }
            let (x, y) = counterexample_ops();
            let control = shi_compare(
                || DynamicDict::zipzip(seed, UpdateScheme::Amortized, seed),
                &x,
                &y,
            )?;
            println!(
                "{:<16} {} (control, mismatch expected)",
                "amortized",
                control.summary_line()
            );
            Ok(all && control.mismatches > 0)
        }
        VerifyMode::Whi => {
            if common.structures.is_some() {
                return Err(Failure::Usage(
                    "verify whi checks the dynamic schemes; --structures does not apply".into(),
                ));
            }
            let n = n.unwrap_or(5);
            let samples = trials.unwrap_or(10_000);
            let strategies = [
                insert_only_strategy(n),
                detour_strategy(n, 1),
                detour_strategy(n, 3),
            ];
            let whi = whi_check(
                |s| DynamicDict::zipzip(seed, UpdateScheme::WeaklyHistoryIndependent, s),
                n,
                samples,
                &strategies,
                seed.child(1),
            )?;
            let ok = report("whi", &whi);
            let (x, y) = counterexample_ops();
            let amortized = whi_check(
                |s| DynamicDict::zipzip(seed, UpdateScheme::Amortized, s),
                3,
                samples.min(1000),
                &[Strategy::new("X", x), Strategy::new("Y", y)],
                seed.child(2),
            )?;
            println!(
                "{:<16} {} (control, distance expected)",
                "amortized",
                amortized.summary_line()
            );
            Ok(ok)
        }
    }
}

fn demo() -> Result<(), Failure> {
    let (x, y) = counterexample_structures(Seed(0))?;
    let (ops_x, ops_y) = counterexample_ops();
    println!("X: {ops_x:?}");
    println!("Y: {ops_y:?}");
    for (name, d) in [("X", &x), ("Y", &y)] {
        let s = d.state();
        println!(
            "{name}: keys={:?} n={} N={} fingerprint={}",
            d.sorted_keys(),
            s.n,
            s.cutoff,
            d.fingerprint().short_hex()
        );
    }
    println!("same contents, different cutoffs: the amortized schedule leaks history");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench {
            test,
            common,
            n,
            n_list,
            alpha,
            alpha_list,
            delta,
            gamma,
            queries,
            trials,
            csv,
            svg,
        } => bench(
            test, &common, n, n_list, alpha, alpha_list, delta, gamma, queries, trials, csv, svg,
        )
        .map(|_| true),
        Command::Verify {
            mode,
            common,
            n,
            trials,
        } => verify(mode, &common, n, trials),
        Command::Demo {
            which: DemoKind::Counterexample,
        } => demo().map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
