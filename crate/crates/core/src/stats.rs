//! Statistics used to turn weak-convergence statements into pass/fail checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{contract, Result};

/// Which side of the threshold counts as a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `statistic < threshold` (KS distances, error magnitudes).
    Below,
    /// `statistic > threshold` (negative controls).
    Above,
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub test_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub sample_sizes: Vec<usize>,
    pub passed: bool,
    pub seed: u64,
    pub metadata: BTreeMap<String, String>,
}

impl SampleReport {
    pub fn below(name: impl Into<String>, statistic: f64, threshold: f64, seed: u64) -> Self {
        Self::with_direction(name, statistic, threshold, Direction::Below, seed)
    }

    pub fn above(name: impl Into<String>, statistic: f64, threshold: f64, seed: u64) -> Self {
        Self::with_direction(name, statistic, threshold, Direction::Above, seed)
    }

    fn with_direction(
        name: impl Into<String>,
        statistic: f64,
        threshold: f64,
        direction: Direction,
        seed: u64,
    ) -> Self {
        // NaN never passes.
        let passed = match direction {
            Direction::Below => statistic < threshold,
            Direction::Above => statistic > threshold,
        };
        Self {
            test_name: name.into(),
            statistic,
            threshold,
            direction,
            sample_sizes: Vec::new(),
            passed,
            seed,
            metadata: BTreeMap::new(),
        }
    }

    pub fn sizes(mut self, sizes: &[usize]) -> Self {
        self.sample_sizes = sizes.to_vec();
        self
    }

    pub fn meta(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }

    /// One JSON object, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

impl Serialize for SampleReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(8))?;
        m.serialize_entry("test", &self.test_name)?;
        m.serialize_entry("statistic", &self.statistic)?;
        m.serialize_entry("threshold", &self.threshold)?;
        m.serialize_entry("passed", &self.passed)?;
        m.serialize_entry("seed", &self.seed)?;
        m.serialize_entry("direction", &self.direction)?;
        m.serialize_entry("sample_sizes", &self.sample_sizes)?;
        m.serialize_entry("metadata", &self.metadata)?;
        m.end()
    }
}

fn sorted(sample: &[f64]) -> Vec<f64> {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Sup distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(contract("KS statistic of an empty sample"));
    }
    let xs = sorted(sample);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Sup distance between two empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(contract("KS statistic of an empty sample"));
    }
    let (xs, ys) = (sorted(a), sorted(b));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    /// 99% normal-approximation interval for the mean.
    pub ci99: (f64, f64),
}

pub fn summarize(sample: &[f64]) -> Result<Summary> {
    if sample.len() < 2 {
        return Err(contract("summary needs at least two observations"));
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let variance = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = 2.576 * (variance / n).sqrt();
    Ok(Summary { mean, variance, ci99: (mean - half, mean + half) })
}

/// Pearson correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(contract("correlation needs two equal-length samples of size >= 2"));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Bernoulli proportion with a Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProportionEstimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci: (f64, f64),
}

/// Wilson interval at normal quantile `z` (1.96 for 95%).
pub fn wilson(successes: u64, trials: u64, z: f64) -> Result<ProportionEstimate> {
    if trials == 0 {
        return Err(contract("proportion estimate needs at least one trial"));
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(ProportionEstimate {
        successes,
        trials,
        estimate: p,
        ci: ((center - half).max(0.0), (center + half).min(1.0)),
    })
}

/// Pearson chi-square statistic and its p-value for observed counts
/// against category probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<(f64, f64)> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(contract("chi-square needs matching counts and probabilities, k >= 2"));
    }
    let n = observed.iter().sum::<u64>() as f64;
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = n * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).map_err(|e| contract(e.to_string()))?;
    Ok((stat, 1.0 - dist.cdf(stat)))
}
