//! Central measures on subgraphs of `Ces^d` obtained by restricting product
//! Cesàro measures to the Gelfand-Tsetlin or Young-jumps cone.
//!
//! The restriction conditions on an event over infinite paths; here it is
//! approximated by conditioning on cone membership of the first `depth`
//! levels, and realized by plain rejection. Level `n` of an accepted path
//! holds the product walk after `n` increments, for `n = 1..=depth`.

use serde::Serialize;

use crate::batch::map_tasks;
use crate::error::{contract, Error, Result};
use crate::graph::{check_level_membership, edge_holds, ConeKind, FrequencyVector, PathWindow};
use crate::rng::RandomStream;
use crate::simplex::{phi_forward, OrderedSimplexPoint};
use crate::stats::{ks_one_sample, wilson, ProportionEstimate, SampleReport};

#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionOutcome {
    pub accepted_path: Option<PathWindow>,
    pub attempts: u64,
}

/// Checks the frequency regime a cone requires.
pub fn check_restriction_preconditions(lambdas: &FrequencyVector, cone: ConeKind) -> Result<()> {
    let lam = lambdas.as_slice();
    if lam.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Precondition(format!("frequencies must be strictly positive, got {lam:?}")));
    }
    if cone == ConeKind::GelfandTsetlin && !lambdas.is_strictly_increasing() {
        return Err(Error::Precondition(format!(
            "Gelfand-Tsetlin restriction needs distinct frequencies, got {lam:?}"
        )));
    }
    Ok(())
}

/// One product-Cesàro attempt, drawn level by level and abandoned at the
/// first level or edge outside the cone. Returns the rows on success.
fn attempt(lam: &[f64], cone: ConeKind, depth: usize, stream: &mut RandomStream) -> Option<Vec<Vec<f64>>> {
    let d = lam.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(depth);
    let mut current = vec![0.0; d];
    for level in 0..depth {
        let next: Vec<f64> = current
            .iter()
            .zip(lam)
            .map(|(x, l)| x + l * stream.next_std_exponential())
            .collect();
        if !check_level_membership(&next) || (level > 0 && !edge_holds(&current, &next, cone, 0.0)) {
            return None;
        }
        rows.push(next.clone());
        current = next;
    }
    Some(rows)
}

pub fn rejection_sample(
    lambdas: &FrequencyVector,
    cone: ConeKind,
    depth: usize,
    stream: &mut RandomStream,
    max_attempts: u64,
) -> Result<RestrictionOutcome> {
    check_restriction_preconditions(lambdas, cone)?;
    if depth == 0 {
        return Err(contract("depth must be >= 1"));
    }
    if max_attempts == 0 {
        return Err(contract("max_attempts must be >= 1"));
    }
    for attempts in 1..=max_attempts {
        if let Some(rows) = attempt(lambdas.as_slice(), cone, depth, stream) {
            let path = PathWindow::from_rows(1, rows)?;
            return Ok(RestrictionOutcome { accepted_path: Some(path), attempts });
        }
    }
    Ok(RestrictionOutcome { accepted_path: None, attempts: max_attempts })
}

/// Summary written next to sampled restricted paths.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictionSummary {
    pub accepted: u64,
    pub attempts: u64,
    pub acceptance_rate: f64,
    pub ci: (f64, f64),
}

/// `count` independent rejection runs; run `t` uses `root.split(t)`.
pub fn rejection_sample_batch(
    lambdas: &FrequencyVector,
    cone: ConeKind,
    depth: usize,
    count: usize,
    max_attempts: u64,
    root: &RandomStream,
    workers: usize,
) -> Result<(Vec<RestrictionOutcome>, RestrictionSummary)> {
    check_restriction_preconditions(lambdas, cone)?;
    let outcomes = map_tasks(root, count, workers, |_, mut s| {
        rejection_sample(lambdas, cone, depth, &mut s, max_attempts)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let accepted = outcomes.iter().filter(|o| o.accepted_path.is_some()).count() as u64;
    let attempts: u64 = outcomes.iter().map(|o| o.attempts).sum();
    let est = wilson(accepted, attempts.max(1), 1.96)?;
    let summary = RestrictionSummary { accepted, attempts, acceptance_rate: est.estimate, ci: est.ci };
    Ok((outcomes, summary))
}

/// Probability that a product-Cesàro path stays in the cone for `depth`
/// levels, with a Wilson 95% interval. Trial `t` uses `stream.split(t)`;
/// since paths are drawn level by level, the same stream gives nested
/// events across depths.
pub fn acceptance_rate(
    lambdas: &FrequencyVector,
    cone: ConeKind,
    depth: usize,
    trials: u64,
    stream: &RandomStream,
) -> Result<ProportionEstimate> {
    if trials == 0 {
        return Err(contract("trials must be >= 1"));
    }
    check_restriction_preconditions(lambdas, cone)?;
    if depth == 0 {
        return wilson(trials, trials, 1.96);
    }
    let lam = lambdas.as_slice();
    let successes = (0..trials)
        .filter(|&t| attempt(lam, cone, depth, &mut stream.split(t)).is_some())
        .count() as u64;
    wilson(successes, trials, 1.96)
}

/// Per-coordinate KS distances from the centrality check.
#[derive(Debug, Clone)]
pub struct CentralityResult {
    pub report: SampleReport,
    pub per_coordinate: Vec<f64>,
    pub conditioned: usize,
    pub generated: usize,
}

/// Paths generated per requested conditioned sample before giving up.
const CENTRALITY_BUDGET: usize = 1000;
const CENTRALITY_MIN_SAMPLES: usize = 100;
pub const CENTRALITY_THRESHOLD: f64 = 0.07;

/// Conditional-uniformity test of the rank-1 Cesàro measure.
///
/// Paths of `depth` exponential increments (mean `lambda`) are kept when the
/// endpoint falls in `endpoint_bin`; the interior levels `1..depth` then form
/// a point of the ordered simplex with apex = realized endpoint, which the
/// cube map sends to `depth - 1` coordinates that should be i.i.d. uniform.
pub fn centrality_test_d1(
    lambda: f64,
    depth: usize,
    endpoint_bin: (f64, f64),
    samples: usize,
    stream: &mut RandomStream,
) -> Result<CentralityResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(contract(format!("lambda must be positive and finite, got {lambda}")));
    }
    centrality_test_with(|s| lambda * s.next_std_exponential(), depth, endpoint_bin, samples, stream)
        .map(|mut r| {
            r.report = r.report.meta("lambda", lambda);
            r
        })
}

/// [`centrality_test_d1`] for an arbitrary increment law, e.g. a corrupted
/// sampler serving as a negative control.
pub fn centrality_test_with(
    mut increment: impl FnMut(&mut RandomStream) -> f64,
    depth: usize,
    endpoint_bin: (f64, f64),
    samples: usize,
    stream: &mut RandomStream,
) -> Result<CentralityResult> {
    let (lo, hi) = endpoint_bin;
    if !(hi > lo) || lo < 0.0 {
        return Err(contract(format!("endpoint bin must have positive length, got [{lo}, {hi}]")));
    }
    if depth < 2 {
        return Err(contract("centrality test needs depth >= 2"));
    }
    if samples == 0 {
        return Err(contract("samples must be >= 1"));
    }
    let n = depth - 1;
    let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(samples); n];
    let mut conditioned = 0;
    let mut generated = 0;
    let mut values = vec![0.0; depth];
    while conditioned < samples && generated < samples.saturating_mul(CENTRALITY_BUDGET) {
        generated += 1;
        let mut acc = 0.0;
        for v in values.iter_mut() {
            acc += increment(stream);
            *v = acc;
        }
        let endpoint = values[depth - 1];
        if !(lo..=hi).contains(&endpoint) {
            continue;
        }
        let point = OrderedSimplexPoint::new(endpoint, values[..n].to_vec())?;
        // Zero coordinates have probability zero; skip rather than perturb.
        let Ok(t) = phi_forward(&point) else { continue };
        for (col, ti) in columns.iter_mut().zip(t) {
            col.push(ti);
        }
        conditioned += 1;
    }
    if conditioned < CENTRALITY_MIN_SAMPLES {
        return Err(Error::InsufficientData { obtained: conditioned, required: CENTRALITY_MIN_SAMPLES });
    }
    let per_coordinate = columns
        .iter()
        .map(|c| ks_one_sample(c, |x| x.clamp(0.0, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    let worst = per_coordinate.iter().cloned().fold(0.0, f64::max);
    let report = SampleReport::below("centrality_d1.max_ks", worst, CENTRALITY_THRESHOLD, stream.master_seed())
        .sizes(&[conditioned])
        .meta("depth", depth)
        .meta("bin", format!("[{lo}, {hi}]"))
        .meta("generated", generated);
    Ok(CentralityResult { report, per_coordinate, conditioned, generated })
}

/// Default endpoint bin: width 10% of the endpoint mean `lambda * depth`,
/// centered on it.
pub fn default_endpoint_bin(lambda: f64, depth: usize) -> (f64, f64) {
    let mean = lambda * depth as f64;
    (0.95 * mean, 1.05 * mean)
}
