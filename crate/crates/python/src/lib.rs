//! Python bindings: the learned dictionaries, the dynamic schemes, the
//! workload generators and the benchmark runners.

use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use learned_hi::bench::{self, BenchOptions, BenchRow, StructureKind};
use learned_hi::dynamics::{counterexample_trace, DynamicDict, UpdateScheme};
use learned_hi::hi::{self, Fingerprinted};
use learned_hi::structures::{DictEntry, Dictionary, LearnedDictionary, Payload};
use learned_hi::{workloads, Error, Frequency, Key, Seed, Weight, ZipZipTree};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NotFound(_) => PyKeyError::new_err(e.to_string()),
        Error::Io { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn payload(bytes: Option<&[u8]>) -> Option<Payload> {
    bytes.map(Payload::from)
}

fn frequency(f: f64) -> PyResult<Frequency> {
    Frequency::new(f).map_err(to_py)
}

/// A bare zip-zip tree taking explicit weights.
#[pyclass(name = "ZipZipTree", unsendable)]
struct PyZipZipTree {
    inner: ZipZipTree,
}

#[pymethods]
impl PyZipZipTree {
    #[new]
    #[pyo3(signature = (seed = 0, biased = false))]
    fn new(seed: u64, biased: bool) -> Self {
        let inner = if biased {
            ZipZipTree::biased(Seed(seed))
        } else {
            ZipZipTree::uniform(Seed(seed))
        };
        PyZipZipTree { inner }
    }

    #[pyo3(signature = (key, weight = 1.0, value = None))]
    fn insert(&mut self, key: Key, weight: f64, value: Option<&[u8]>) -> PyResult<()> {
        let mut entry = DictEntry::new(key, Weight::new(weight).map_err(to_py)?);
        entry.payload = payload(value);
        self.inner.insert(entry).map_err(to_py)
    }

    fn delete(&mut self, key: Key) -> PyResult<()> {
        self.inner.delete(key).map(|_| ()).map_err(to_py)
    }

    /// `(found, comparisons)`
    fn search(&self, key: Key) -> (bool, u64) {
        let r = self.inner.search(key);
        (r.found, r.comparisons.get())
    }

    fn get<'py>(&self, py: Python<'py>, key: Key) -> Option<Bound<'py, PyBytes>> {
        self.inner.search(key).payload.map(|p| PyBytes::new(py, &p))
    }

    fn predecessor(&self, key: Key) -> Option<Key> {
        self.inner.predecessor(key)
    }

    fn range(&self, lo: Key, hi: Key) -> PyResult<Vec<Key>> {
        self.inner.range(lo, hi).map_err(to_py)
    }

    fn keys(&self) -> Vec<Key> {
        self.inner.keys()
    }

    fn height(&self) -> usize {
        self.inner.height()
    }

    fn preorder(&self) -> Vec<(Key, usize)> {
        self.inner.preorder()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint().short_hex()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, key: Key) -> bool {
        self.inner.contains(key)
    }
}

/// Any benchmarked structure, driven by raw frequency estimates.
#[pyclass(name = "LearnedDict", unsendable)]
struct PyLearnedDict {
    inner: Box<dyn LearnedDictionary>,
    kind: StructureKind,
}

#[pymethods]
impl PyLearnedDict {
    /// `capacity` sizes the threshold floor; `gamma` sets the paired budget.
    #[new]
    #[pyo3(signature = (structure, capacity = 1024, seed = 0, gamma = 1.0))]
    fn new(structure: &str, capacity: usize, seed: u64, gamma: f64) -> PyResult<Self> {
        let kind: StructureKind = structure.parse().map_err(to_py)?;
        let inner = kind.build(Seed(seed), capacity, gamma).map_err(to_py)?;
        Ok(PyLearnedDict { inner, kind })
    }

    #[getter]
    fn structure(&self) -> &'static str {
        self.kind.name()
    }

    #[pyo3(signature = (key, frequency = 0.0, value = None))]
    fn insert(&mut self, key: Key, frequency: f64, value: Option<&[u8]>) -> PyResult<()> {
        let f = self::frequency(frequency)?;
        self.inner
            .insert_estimate(key, f, payload(value))
            .map_err(to_py)
    }

    fn delete(&mut self, key: Key) -> PyResult<()> {
        self.inner.remove(key).map_err(to_py)
    }

    fn search(&self, key: Key) -> (bool, u64) {
        let r = self.inner.lookup(key);
        (r.found, r.comparisons.get())
    }

    fn get<'py>(&self, py: Python<'py>, key: Key) -> Option<Bound<'py, PyBytes>> {
        self.inner.lookup(key).payload.map(|p| PyBytes::new(py, &p))
    }

    fn predecessor(&self, key: Key) -> Option<Key> {
        self.inner.predecessor_of(key)
    }

    fn range(&self, lo: Key, hi: Key) -> PyResult<Vec<Key>> {
        self.inner.keys_in(lo, hi).map_err(to_py)
    }

    fn keys(&self) -> Vec<Key> {
        self.inner.sorted_keys()
    }

    fn nodes(&self) -> usize {
        self.inner.nodes()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint().short_hex()
    }

    fn __len__(&self) -> usize {
        self.inner.count()
    }

    fn __contains__(&self, key: Key) -> bool {
        self.inner.lookup(key).found
    }
}

/// Threshold zip-zip tree whose cutoff follows a rebuild scheme.
#[pyclass(name = "DynamicDict", unsendable)]
struct PyDynamicDict {
    inner: DynamicDict<ZipZipTree>,
}

#[pymethods]
impl PyDynamicDict {
    /// `scheme` is `"whi"` or `"amortized"`.
    #[new]
    #[pyo3(signature = (scheme = "whi", seed = 0, scheme_seed = 1))]
    fn new(scheme: &str, seed: u64, scheme_seed: u64) -> PyResult<Self> {
        let scheme = match scheme {
            "whi" => UpdateScheme::WeaklyHistoryIndependent,
            "amortized" => UpdateScheme::Amortized,
            other => return Err(PyValueError::new_err(format!("unknown scheme `{other}`"))),
        };
        Ok(PyDynamicDict {
            inner: DynamicDict::zipzip(Seed(seed), scheme, Seed(scheme_seed)),
        })
    }

    #[pyo3(signature = (key, frequency = 0.0))]
    fn insert(&mut self, key: Key, frequency: f64) -> PyResult<()> {
        let f = self::frequency(frequency)?;
        self.inner.insert(key, f, None).map_err(to_py)
    }

    fn delete(&mut self, key: Key) -> PyResult<()> {
        self.inner.delete(key).map_err(to_py)
    }

    fn search(&self, key: Key) -> (bool, u64) {
        let r = self.inner.search(key);
        (r.found, r.comparisons.get())
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.inner.state().cutoff
    }

    #[getter]
    fn rebuilds(&self) -> u64 {
        self.inner.stats().rebuilds
    }

    fn keys(&self) -> Vec<Key> {
        self.inner.sorted_keys()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint().short_hex()
    }

    fn __len__(&self) -> usize {
        self.inner.state().n
    }
}

#[pyfunction]
fn threshold(f: f64, capacity: usize) -> PyResult<f64> {
    learned_hi::threshold::threshold(f, capacity)
        .map(Frequency::get)
        .map_err(to_py)
}

#[pyfunction]
fn zipf_frequencies(n: usize, alpha: f64) -> PyResult<Vec<f64>> {
    workloads::zipf_frequencies(n, alpha).map_err(to_py)
}

#[pyfunction]
fn inverse_power_frequencies(n: usize, alpha: f64) -> PyResult<Vec<f64>> {
    workloads::inverse_power_frequencies(n, alpha).map_err(to_py)
}

#[pyfunction]
fn adversarial_rank(i: usize, n: usize, delta: f64) -> usize {
    workloads::adversarial_rank(i, n, delta)
}

#[pyfunction]
fn assigned_frequencies(base: Vec<f64>, delta: f64) -> PyResult<Vec<f64>> {
    workloads::assigned_frequencies(&base, delta).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (frequencies, count, seed = 0))]
fn sample_queries(frequencies: Vec<f64>, count: usize, seed: u64) -> PyResult<Vec<Key>> {
    workloads::sample_queries(&frequencies, count, Seed(seed)).map_err(to_py)
}

fn rows_to_py<'py>(py: Python<'py>, rows: &[BenchRow]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("test", &r.test)?;
            d.set_item("structure", &r.structure)?;
            d.set_item("n", r.n)?;
            d.set_item("alpha", r.alpha)?;
            d.set_item("delta", r.delta)?;
            d.set_item("gamma", r.gamma)?;
            d.set_item("seed", r.seed)?;
            d.set_item("queries", r.queries)?;
            d.set_item("avg_comparisons", r.avg_comparisons)?;
            d.set_item("max_comparisons", r.max_comparisons)?;
            d.set_item("nodes", r.nodes)?;
            Ok(d)
        })
        .collect()
}

/// Runs one experiment and returns its rows as dicts.
#[pyfunction]
#[pyo3(signature = (test, structures = None, n_values = None, alpha = None, delta = None,
    queries = 100_000, trials = 10, seed = 0, gamma = 1.0))]
#[allow(clippy::too_many_arguments)]
fn run_bench<'py>(
    py: Python<'py>,
    test: &str,
    structures: Option<Vec<String>>,
    n_values: Option<Vec<usize>>,
    alpha: Option<Vec<f64>>,
    delta: Option<f64>,
    queries: usize,
    trials: usize,
    seed: u64,
    gamma: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let structures = match structures {
        Some(names) => names
            .iter()
            .map(|s| s.parse::<StructureKind>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?,
        None => StructureKind::ALL.to_vec(),
    };
    let opts = BenchOptions {
        structures,
        queries,
        trials,
        seed: Seed(seed),
        gamma,
    };
    let ns = n_values.unwrap_or_else(|| bench::DEFAULT_N_VALUES.to_vec());
    let rows = match test {
        "zipf-param" => {
            let alphas = alpha.unwrap_or_else(|| bench::DEFAULT_ALPHAS.to_vec());
            bench::run_zipf_param(&opts, &alphas, ns.first().copied().unwrap_or(2000))
        }
        "noisy-zipf" => bench::run_noisy_zipf(
            &opts,
            &ns,
            alpha.and_then(|a| a.first().copied()).unwrap_or(2.0),
            delta.unwrap_or(0.9),
        ),
        "inverse-power" => bench::run_inverse_power(
            &opts,
            &ns,
            alpha.and_then(|a| a.first().copied()).unwrap_or(1.01),
            delta.unwrap_or(0.9),
        ),
        "size" => bench::run_size(&opts, &ns),
        other => return Err(PyValueError::new_err(format!("unknown test `{other}`"))),
    }
    .map_err(to_py)?;
    rows_to_py(py, &rows)
}

/// Strong history-independence check on one structure; returns
/// `(trials, mismatches)`.
#[pyfunction]
#[pyo3(signature = (structure, universe_size = 6, trials = 100, seed = 0))]
fn shi_check(
    structure: &str,
    universe_size: usize,
    trials: usize,
    seed: u64,
) -> PyResult<(usize, usize)> {
    let kind: StructureKind = structure.parse().map_err(to_py)?;
    let seed = Seed(seed);
    let r = hi::shi_check(
        || {
            kind.build(seed, universe_size, 1.0)
                .expect("valid configuration")
        },
        universe_size,
        trials,
        seed,
    )
    .map_err(to_py)?;
    Ok((r.trials, r.mismatches))
}

/// Final `(n, N)` of the two amortized-scheme histories.
#[pyfunction]
fn counterexample() -> ((usize, usize), (usize, usize)) {
    let (x, y) = counterexample_trace();
    ((x.n, x.cutoff), (y.n, y.cutoff))
}

#[pymodule]
#[pyo3(name = "learned_hi")]
fn learned_hi_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyZipZipTree>()?;
    m.add_class::<PyLearnedDict>()?;
    m.add_class::<PyDynamicDict>()?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(zipf_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_power_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(adversarial_rank, m)?)?;
    m.add_function(wrap_pyfunction!(assigned_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(sample_queries, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    m.add_function(wrap_pyfunction!(shi_check, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample, m)?)?;
    m.add(
        "STRUCTURES",
        StructureKind::ALL.map(StructureKind::name).to_vec(),
    )?;
    Ok(())
}
