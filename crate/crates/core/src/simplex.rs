//! Uniform points of the ordered simplex `0 <= x0 <= ... <= x_{n-1} <= a`.
//!
//! Two exact samplers are provided: sorting `n` uniforms on `[0, a]`, and
//! pulling a uniform point of the unit cube back through the triangular
//! map
//!
//! ```text
//! t_i     = (x_i / x_{i+1})^(i+1)   for i < n-1
//! t_{n-1} = (x_{n-1} / a)^n
//! ```
//!
//! whose Jacobian is constant (`n!` after normalization), so it carries the
//! normalized volume of the simplex onto Lebesgue measure on `[0,1]^n`.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::rng::RandomStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedSimplexPoint {
    apex: f64,
    coords: Vec<f64>,
}

impl OrderedSimplexPoint {
    pub fn new(apex: f64, coords: Vec<f64>) -> Result<Self> {
        if !(apex > 0.0 && apex.is_finite()) {
            return Err(contract(format!("apex must be positive and finite, got {apex}")));
        }
        if coords.is_empty() {
            return Err(contract("simplex dimension must be at least 1"));
        }
        let ordered = coords[0] >= 0.0
            && coords.windows(2).all(|w| w[0] <= w[1])
            && coords[coords.len() - 1] <= apex;
        if !ordered {
            return Err(contract("coordinates must satisfy 0 <= x0 <= ... <= x_{n-1} <= a"));
        }
        Ok(Self { apex, coords })
    }

    pub fn apex(&self) -> f64 {
        self.apex
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Spacings `y0 = x0, y_i = x_i - x_{i-1}`.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.coords
            .iter()
            .map(|&x| {
                let y = x - prev;
                prev = x;
                y
            })
            .collect()
    }

    /// The reflection `(x0, ..., x_{n-1}) -> (a - x_{n-1}, ..., a - x0)`.
    pub fn reflected(&self) -> Self {
        Self {
            apex: self.apex,
            coords: self.coords.iter().rev().map(|x| self.apex - x).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SimplexMethod {
    #[default]
    SortUniforms,
    PhiInverse,
}

impl std::str::FromStr for SimplexMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sort" => Ok(Self::SortUniforms),
            "phi" => Ok(Self::PhiInverse),
            other => Err(Error::Parse(format!("unknown method `{other}` (expected sort|phi)"))),
        }
    }
}

fn check_params(n: usize, a: f64) -> Result<()> {
    if n == 0 {
        return Err(contract("simplex dimension n must be >= 1"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(contract(format!("apex a must be positive and finite, got {a}")));
    }
    Ok(())
}

pub fn sample_ordered_simplex(
    n: usize,
    a: f64,
    stream: &mut RandomStream,
    method: SimplexMethod,
) -> Result<OrderedSimplexPoint> {
    check_params(n, a)?;
    match method {
        SimplexMethod::SortUniforms => {
            let mut coords: Vec<f64> = (0..n).map(|_| a * stream.next_uniform01()).collect();
            coords.sort_unstable_by(f64::total_cmp);
            Ok(OrderedSimplexPoint { apex: a, coords })
        }
        SimplexMethod::PhiInverse => {
            let t: Vec<f64> = (0..n).map(|_| stream.next_open01()).collect();
            phi_inverse(&t, a)
        }
    }
}

/// The cube map. Fails on a zero coordinate, where a ratio is undefined.
pub fn phi_forward(p: &OrderedSimplexPoint) -> Result<Vec<f64>> {
    let x = &p.coords;
    let n = x.len();
    if x[0] <= 0.0 {
        return Err(Error::Domain("zero coordinate: cube map undefined".into()));
    }
    let mut t = Vec::with_capacity(n);
    for i in 0..n - 1 {
        t.push(power(x[i] / x[i + 1], i + 1));
    }
    t.push(power(x[n - 1] / p.apex, n));
    Ok(t)
}

/// Inverse of [`phi_forward`] for `t` strictly inside the unit cube.
pub fn phi_inverse(t: &[f64], a: f64) -> Result<OrderedSimplexPoint> {
    check_params(t.len(), a)?;
    if t.iter().any(|&ti| !(ti > 0.0 && ti < 1.0)) {
        return Err(Error::Domain("cube point must lie in the open cube (0,1)^n".into()));
    }
    let n = t.len();
    let mut coords = vec![0.0; n];
    coords[n - 1] = a * root(t[n - 1], n);
    for i in (0..n - 1).rev() {
        coords[i] = coords[i + 1] * root(t[i], i + 1);
    }
    Ok(OrderedSimplexPoint { apex: a, coords })
}

#[inline]
fn power(r: f64, k: usize) -> f64 {
    match i32::try_from(k) {
        Ok(k) => r.powi(k),
        Err(_) => (k as f64 * r.ln()).exp(),
    }
}

#[inline]
fn root(t: f64, k: usize) -> f64 {
    if k == 1 {
        t
    } else {
        (t.ln() / k as f64).exp()
    }
}

/// Density of the first `k = y.len()` spacings of a uniform point of the
/// `n`-dimensional ordered simplex with apex `a`:
///
/// ```text
/// n! / (n-k)! * a^-k * (1 - s/a)^(n-k),   s = y0 + ... + y_{k-1} <= a
/// ```
///
/// and zero for `s > a`. Evaluated in log space so large `n` is safe.
pub fn marginal_increment_density(y: &[f64], n: usize, a: f64) -> Result<f64> {
    check_params(n, a)?;
    let k = y.len();
    if k == 0 || k > n {
        return Err(contract(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    if y.iter().any(|&yi| !(yi >= 0.0)) {
        return Err(contract("increments must be nonnegative"));
    }
    let s: f64 = y.iter().sum();
    if s > a {
        return Ok(0.0);
    }
    let falling: f64 = (0..k).map(|j| ((n - j) as f64).ln()).sum();
    let tail = if n == k { 0.0 } else { (n - k) as f64 * (-s / a).ln_1p() };
    Ok((falling - k as f64 * a.ln() + tail).exp())
}
