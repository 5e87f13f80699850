//! Cesàro measures: random walks with i.i.d. exponential increments of
//! mean `lambda`, and their independent d-fold products.
//!
//! Exponentials are always parameterized by their mean.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::graph::FrequencyVector;
use crate::rng::RandomStream;

/// `values[j]` is the walk after `j + 1` increments, i.e. the vertex at
/// level `j + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesaroPath {
    lambda: f64,
    values: Vec<f64>,
}

impl CesaroPath {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at `level` (number of increments), with level 0 the origin.
    pub fn at_level(&self, level: usize) -> f64 {
        if level == 0 {
            0.0
        } else {
            self.values[level - 1]
        }
    }

    pub fn increments(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.values
            .iter()
            .map(|&x| {
                let y = x - prev;
                prev = x;
                y
            })
            .collect()
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_infinite() {
        return Err(contract("lambda = infinity gives the zero measure, which has no paths"));
    }
    if !(lambda >= 0.0) {
        return Err(contract(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(())
}

fn check_length(length: usize) -> Result<()> {
    if length == 0 {
        return Err(contract("path length must be >= 1"));
    }
    Ok(())
}

pub fn sample_cesaro_path(lambda: f64, length: usize, stream: &mut RandomStream) -> Result<CesaroPath> {
    check_lambda(lambda)?;
    check_length(length)?;
    if lambda == 0.0 {
        return Ok(CesaroPath { lambda, values: vec![0.0; length] });
    }
    let mut acc = 0.0;
    let values = (0..length)
        .map(|_| {
            acc += lambda * stream.next_std_exponential();
            acc
        })
        .collect();
    Ok(CesaroPath { lambda, values })
}

/// d independent Cesàro paths, coordinate `i` with mean `lambdas[i]`.
///
/// Increments are drawn level by level, so a path of depth `D` is a prefix
/// of the path of depth `D' > D` drawn from the same stream state.
pub fn sample_product_cesaro(
    lambdas: &FrequencyVector,
    length: usize,
    stream: &mut RandomStream,
) -> Result<Vec<CesaroPath>> {
    let lam = lambdas.as_slice();
    for &l in lam {
        check_lambda(l)?;
    }
    check_length(length)?;
    let d = lam.len();
    let mut values = vec![Vec::with_capacity(length); d];
    let mut acc = vec![0.0; d];
    for _ in 0..length {
        for i in 0..d {
            if lam[i] > 0.0 {
                acc[i] += lam[i] * stream.next_std_exponential();
            }
            values[i].push(acc[i]);
        }
    }
    Ok(lam
        .iter()
        .zip(values)
        .map(|(&lambda, values)| CesaroPath { lambda, values })
        .collect())
}
