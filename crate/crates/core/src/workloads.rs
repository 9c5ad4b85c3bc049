//! Frequency distributions and query streams for the experiments.
//!
//! Key `i` (1-based) has true frequency `base[i-1]`. Under noise parameter
//! `delta` it is *inserted* with the frequency of its adversarial rank, while
//! queries keep following the true frequencies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::{Key, Seed};

/// Default query count per experiment.
pub const DEFAULT_QUERIES: usize = 100_000;

/// Tolerance on distribution sums.
const SUM_TOLERANCE: f64 = 1e-9;
/// Cap applied to assigned frequencies before renormalizing.
const ASSIGNED_CAP: f64 = 1.0 + 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    /// `f_i ∝ 1 / i^alpha`
    Zipfian,
    /// `f_i ∝ 1 / alpha^i`
    InversePower,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorkloadSpec {
    pub dist: Distribution,
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub queries: usize,
    pub seed: Seed,
}

impl WorkloadSpec {
    pub fn new(dist: Distribution, n: usize, alpha: f64, delta: f64) -> Self {
        WorkloadSpec {
            dist,
            n,
            alpha,
            delta,
            queries: DEFAULT_QUERIES,
            seed: Seed(0),
        }
    }

    pub fn base_frequencies(&self) -> Result<Vec<f64>> {
        match self.dist {
            Distribution::Zipfian => zipf_frequencies(self.n, self.alpha),
            Distribution::InversePower => inverse_power_frequencies(self.n, self.alpha),
        }
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

pub fn zipf_frequencies(n: usize, alpha: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "Zipf parameter {alpha} must be >= 1"
        )));
    }
    Ok(normalize(
        (1..=n).map(|i| (i as f64).powf(-alpha)).collect(),
    ))
}

pub fn inverse_power_frequencies(n: usize, alpha: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "inverse power base {alpha} must be > 1"
        )));
    }
    // scaled by alpha^1 so the largest term is 1; ratios are unchanged
    Ok(normalize(
        (1..=n).map(|i| alpha.powf(1.0 - i as f64)).collect(),
    ))
}

/// `round(i(1-delta) + delta(n-i+1))`, halves rounded up, clamped to `[1, n]`.
pub fn adversarial_rank(i: usize, n: usize, delta: f64) -> usize {
    let x = i as f64 * (1.0 - delta) + delta * (n as f64 - i as f64 + 1.0);
    ((x + 0.5).floor() as usize).clamp(1, n.max(1))
}

/// Insertion frequencies: key `i` receives `base[adversarial_rank(i)]`.
/// Rank collisions can push the sum above one; past the cap the vector is
/// renormalized.
pub fn assigned_frequencies(base: &[f64], delta: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta {delta} outside [0, 1]")));
    }
    let n = base.len();
    let assigned: Vec<f64> = (1..=n)
        .map(|i| base[adversarial_rank(i, n, delta) - 1])
        .collect();
    if assigned.iter().sum::<f64>() > ASSIGNED_CAP {
        Ok(normalize(assigned))
    } else {
        Ok(assigned)
    }
}

fn check_distribution(freqs: &[f64]) -> Result<()> {
    if freqs.is_empty() {
        return Err(Error::Domain("empty distribution".into()));
    }
    if freqs.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Domain(
            "distribution has a negative or non-finite entry".into(),
        ));
    }
    let total: f64 = freqs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Domain(format!(
            "distribution sums to {total}, not 1"
        )));
    }
    Ok(())
}

/// I.i.d. keys (1-based) drawn by inverse CDF from a seeded uniform stream.
pub fn sample_queries(freqs: &[f64], count: usize, seed: Seed) -> Result<Vec<Key>> {
    check_distribution(freqs)?;
    let mut cdf = Vec::with_capacity(freqs.len());
    let mut acc = 0.0;
    for f in freqs {
        acc += f;
        cdf.push(acc);
    }
    let last = freqs.iter().rposition(|&f| f > 0.0).expect("sums to one");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * acc;
            let idx = cdf.partition_point(|&c| c <= u).min(last);
            idx as Key + 1
        })
        .collect())
}
