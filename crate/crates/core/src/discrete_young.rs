//! Bernoulli walks on the Pascal graph `Z_+^k`, their restriction to the
//! chamber `n1 >= n2 >= ... >= nk` (the k-row Young graph), and Schur
//! functions.
//!
//! The restricted measure gives a chamber path with step counts `c` the
//! probability `prod p_i^{c_i} * h(end) / h(origin)`, where `h` is the
//! probability of never leaving the chamber. This per-path probability is
//! `s_λ(p)` with `λ` the endpoint; a diagram's probability is the number of
//! chamber paths to it times that value. Counts are exact integers; only
//! probabilities are floating point.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::rng::RandomStream;
use crate::stats::{wilson, ProportionEstimate};

const PROB_SUM_TOL: f64 = 1e-12;
/// Largest `|λ|` evaluated by tableau enumeration in [`schur`].
pub const COMBINATORIAL_MAX_SIZE: u32 = 20;
const BIALTERNANT_MIN_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(contract("partition needs k >= 1 parts"));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(contract(format!("parts must be weakly decreasing, got {parts:?}")));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// All partitions of `n` with at most `k` parts, padded to length `k`,
    /// in reverse lexicographic order.
    pub fn all_of_size(n: u32, k: usize) -> Vec<Partition> {
        fn rec(rem: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if slots == 0 {
                if rem == 0 {
                    out.push(Partition(cur.clone()));
                }
                return;
            }
            for part in (0..=rem.min(max)).rev() {
                cur.push(part);
                rec(rem - part, part, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, k, &mut Vec::with_capacity(k), &mut out);
        out
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Steps of a walk: `steps[t]` is the 0-based coordinate incremented at
/// time `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscretePath {
    pub steps: Vec<usize>,
}

impl DiscretePath {
    /// Builds from 1-based coordinate labels, as written in tables.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        labels
            .iter()
            .map(|&l| l.checked_sub(1).ok_or_else(|| contract("coordinate labels start at 1")))
            .collect::<Result<Vec<_>>>()
            .map(|steps| Self { steps })
    }

    /// Final counts per coordinate.
    pub fn counts(&self, k: usize) -> Result<Vec<u32>> {
        let mut c = vec![0u32; k];
        for &s in &self.steps {
            *c.get_mut(s).ok_or_else(|| contract(format!("step index {s} out of range for k = {k}")))? += 1;
        }
        Ok(c)
    }
}

fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.is_empty() || p.iter().any(|&x| !(x > 0.0)) {
        return Err(contract(format!("probabilities must be positive, got {p:?}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(contract(format!("probabilities must sum to 1, got {sum}")));
    }
    Ok(())
}

fn check_strictly_decreasing(p: &[f64]) -> Result<()> {
    if !p.windows(2).all(|w| w[0] > w[1]) {
        return Err(contract(format!("p must be strictly decreasing, got {p:?}")));
    }
    Ok(())
}

/// i.i.d. categorical steps with law `p`.
pub fn sample_bernoulli_pascal(p: &[f64], steps: usize, stream: &mut RandomStream) -> Result<DiscretePath> {
    check_probability_vector(p)?;
    if steps == 0 {
        return Err(contract("steps must be >= 1"));
    }
    let last = p.len() - 1;
    let steps = (0..steps)
        .map(|_| {
            let u = stream.next_uniform01();
            let mut acc = 0.0;
            p.iter()
                .position(|&pi| {
                    acc += pi;
                    u < acc
                })
                .unwrap_or(last)
        })
        .collect();
    Ok(DiscretePath { steps })
}

/// `true` iff running counts satisfy `n1 >= ... >= nk` after every step.
pub fn stays_in_chamber(path: &DiscretePath, k: usize) -> bool {
    let mut counts = vec![0u32; k];
    for &s in &path.steps {
        if s >= k {
            return false;
        }
        counts[s] += 1;
        if s > 0 && counts[s] > counts[s - 1] {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurMethod {
    /// Sum over semistandard Young tableaux.
    Combinatorial,
    /// `det(p_i^(λ_j + k - j)) / det(p_i^(k - j))`.
    Bialternant,
}

/// `s_λ(p)`, by tableau enumeration for `|λ| <= 20`, else by bialternant.
pub fn schur(lam: &Partition, p: &[f64]) -> Result<f64> {
    let method = if lam.size() <= COMBINATORIAL_MAX_SIZE {
        SchurMethod::Combinatorial
    } else {
        SchurMethod::Bialternant
    };
    schur_with(lam, p, method)
}

pub fn schur_with(lam: &Partition, p: &[f64], method: SchurMethod) -> Result<f64> {
    if lam.k() != p.len() {
        return Err(contract(format!("partition has {} parts but p has {} entries", lam.k(), p.len())));
    }
    if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(contract(format!("Schur arguments must be positive, got {p:?}")));
    }
    match method {
        SchurMethod::Combinatorial => Ok(schur_tableaux(lam, p)),
        SchurMethod::Bialternant => schur_bialternant(lam, p),
    }
}

fn schur_tableaux(lam: &Partition, p: &[f64]) -> f64 {
    let shape: Vec<usize> = lam.parts().iter().map(|&x| x as usize).filter(|&x| x > 0).collect();
    let cells: Vec<(usize, usize)> = shape
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();
    let mut grid: Vec<Vec<usize>> = shape.iter().map(|&len| vec![0; len]).collect();

    // Fill cells in row-major order; each entry is >= its left neighbour and
    // > the entry above.
    fn fill(idx: usize, cells: &[(usize, usize)], grid: &mut [Vec<usize>], p: &[f64], weight: f64) -> f64 {
        let Some(&(r, c)) = cells.get(idx) else { return weight };
        let left = if c > 0 { grid[r][c - 1] } else { 0 };
        let above = if r > 0 { grid[r - 1][c] + 1 } else { 0 };
        let mut total = 0.0;
        for v in left.max(above)..p.len() {
            grid[r][c] = v;
            total += fill(idx + 1, cells, grid, p, weight * p[v]);
        }
        total
    }
    fill(0, &cells, &mut grid, p, 1.0)
}

fn schur_bialternant(lam: &Partition, p: &[f64]) -> Result<f64> {
    let k = p.len();
    for i in 0..k {
        for j in i + 1..k {
            let gap = (p[i] - p[j]).abs() / p[i].max(p[j]);
            if gap < BIALTERNANT_MIN_GAP {
                return Err(Error::IllConditioned(format!(
                    "arguments {} and {} nearly coincide (relative gap {gap:e}); use the combinatorial route",
                    p[i], p[j]
                )));
            }
        }
    }
    let parts = lam.parts();
    let num: Vec<f64> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| p[i].powi((parts[j] as usize + k - 1 - j) as i32))
        .collect();
    let den: Vec<f64> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| p[i].powi((k - 1 - j) as i32))
        .collect();
    Ok(determinant(num, k) / determinant(den, k))
}

/// LU with partial pivoting, row-major `k x k`.
fn determinant(mut m: Vec<f64>, k: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a * k + col].abs().total_cmp(&m[b * k + col].abs()))
            .expect("nonempty range");
        if m[pivot * k + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..k {
                m.swap(pivot * k + c, col * k + c);
            }
            det = -det;
        }
        let d = m[col * k + col];
        det *= d;
        for r in col + 1..k {
            let f = m[r * k + col] / d;
            for c in col..k {
                m[r * k + c] -= f * m[col * k + c];
            }
        }
    }
    det
}

/// Closed-form survival for two rows: from gap `g = n1 - n2`, the walk never
/// leaves the chamber with probability `1 - (p2/p1)^(g+1)`.
pub fn survival_two_rows(start: &Partition, p: &[f64]) -> Result<f64> {
    if start.k() != 2 || p.len() != 2 {
        return Err(contract("closed-form survival is for k = 2"));
    }
    check_strictly_decreasing(p)?;
    let g = start.parts()[0] - start.parts()[1];
    Ok(1.0 - (p[1] / p[0]).powi(g as i32 + 1))
}

/// Normalized restricted-measure probability of a chamber path.
pub fn chamber_path_probability(
    path: &DiscretePath,
    p: &[f64],
    survival: impl Fn(&Partition) -> Result<f64>,
) -> Result<f64> {
    check_probability_vector(p)?;
    check_strictly_decreasing(p)?;
    let k = p.len();
    if !stays_in_chamber(path, k) {
        return Err(contract("path leaves the chamber"));
    }
    let counts = path.counts(k)?;
    let raw = raw_weight(&counts, p);
    let end = Partition::new(counts)?;
    let origin = Partition::new(vec![0; k])?;
    Ok(raw * survival(&end)? / survival(&origin)?)
}

/// `prod p_i^{c_i}`; depends on the endpoint only.
pub fn raw_weight(counts: &[u32], p: &[f64]) -> f64 {
    counts.iter().zip(p).map(|(&c, &pi)| pi.powi(c as i32)).product()
}

/// Monte Carlo estimate of staying in the chamber for `truncation` steps
/// from `start`. The finite horizon over-estimates the infinite-horizon
/// survival; the bias vanishes as `truncation` grows.
pub fn survival_probability(
    start: &Partition,
    p: &[f64],
    truncation: usize,
    trials: u64,
    stream: &mut RandomStream,
) -> Result<ProportionEstimate> {
    if trials == 0 {
        return Err(contract("trials must be >= 1"));
    }
    check_probability_vector(p)?;
    check_strictly_decreasing(p)?;
    let k = p.len();
    if start.k() != k {
        return Err(contract("start partition and p have different lengths"));
    }
    if k == 1 {
        return wilson(trials, trials, 1.96);
    }
    let mut survived = 0;
    let mut counts = start.parts().to_vec();
    for _ in 0..trials {
        counts.copy_from_slice(start.parts());
        let walk = sample_bernoulli_pascal(p, truncation.max(1), stream)?;
        let ok = walk.steps.iter().take(truncation).all(|&s| {
            counts[s] += 1;
            s == 0 || counts[s] <= counts[s - 1]
        });
        survived += ok as u64;
    }
    wilson(survived, trials, 1.96)
}

/// Every sequence of `n` steps over `k` coordinates that stays in the chamber.
pub fn enumerate_chamber_paths(n: usize, k: usize) -> Vec<DiscretePath> {
    fn rec(n: usize, counts: &mut Vec<u32>, steps: &mut Vec<usize>, out: &mut Vec<DiscretePath>) {
        if steps.len() == n {
            out.push(DiscretePath { steps: steps.clone() });
            return;
        }
        for s in 0..counts.len() {
            if s > 0 && counts[s] + 1 > counts[s - 1] {
                continue;
            }
            counts[s] += 1;
            steps.push(s);
            rec(n, counts, steps, out);
            steps.pop();
            counts[s] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, &mut vec![0; k], &mut Vec::with_capacity(n), &mut out);
    out
}

/// One row of the Thoma/Schur comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct ThomaRow {
    pub lambda: Partition,
    pub schur: f64,
    pub per_path_prob: f64,
    pub abs_error: f64,
    pub paths: usize,
}

/// Compares per-path probabilities (closed-form survival) with Schur values
/// for every partition of size `<= max_size`, two rows. Returns the table
/// and the worst level-mass error.
pub fn thoma_table(p: &[f64], max_size: u32) -> Result<(Vec<ThomaRow>, f64)> {
    check_probability_vector(p)?;
    check_strictly_decreasing(p)?;
    if p.len() != 2 {
        return Err(contract("the closed-form table is for k = 2"));
    }
    let survival = |lam: &Partition| survival_two_rows(lam, p);
    let mut rows = Vec::new();
    let mut worst_mass: f64 = 0.0;
    for n in 0..=max_size {
        let paths = enumerate_chamber_paths(n as usize, 2);
        let mut mass = 0.0;
        for lam in Partition::all_of_size(n, 2) {
            let s = schur(&lam, p)?;
            let mut count = 0;
            let mut err: f64 = 0.0;
            let mut prob = f64::NAN;
            for path in paths.iter().filter(|q| q.counts(2).ok().as_deref() == Some(lam.parts())) {
                let pr = chamber_path_probability(path, p, survival)?;
                err = err.max((pr - s).abs());
                prob = pr;
                count += 1;
                mass += pr;
            }
            rows.push(ThomaRow { lambda: lam, schur: s, per_path_prob: prob, abs_error: err, paths: count });
        }
        worst_mass = worst_mass.max((mass - 1.0).abs());
    }
    Ok((rows, worst_mass))
}
