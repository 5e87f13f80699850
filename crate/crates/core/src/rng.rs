//! Counter-based, splittable random streams.
//!
//! A stream is a 64-bit key plus a counter. Output `k` is a two-round
//! SplitMix64 finalization of `(key, k)`, so a stream is reproducible from
//! its key alone and splitting is a pure function of the key and the child
//! index. Streams are single-owner: split first, then move children to
//! workers.

use num_complex::Complex64;

use crate::error::{contract, Result};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn derive_key(parent: u64, index: u64) -> u64 {
    mix64(parent ^ mix64(index.wrapping_add(GOLDEN)).rotate_left(17))
}

/// Child index used for worker `w` and task `t` when a driver wants the
/// worker to be part of the derivation path.
pub fn worker_task_index(worker: u32, task: u32) -> u64 {
    ((worker as u64) << 32) | task as u64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    master_seed: u64,
    stream_index: u64,
    key: u64,
    counter: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = derive_key(mix64(master_seed), stream_index);
        Self { master_seed, stream_index, key, counter: 0 }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Child stream determined by this stream's key and `child_index`.
    /// The parent's counter is not consulted or advanced.
    pub fn split(&self, child_index: u64) -> RandomStream {
        Self {
            master_seed: self.master_seed,
            stream_index: child_index,
            key: derive_key(self.key, child_index),
            counter: 0,
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter = self.counter.wrapping_add(1);
        let z = mix64(c.wrapping_mul(GOLDEN) ^ self.key);
        mix64(z.wrapping_add(self.key.rotate_left(32)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_uniform01(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn next_open01(&mut self) -> f64 {
        loop {
            let u = self.next_uniform01();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Exponential variate with the given MEAN, by inversion: `-mean * ln(1 - U)`.
    pub fn next_exponential(&mut self, mean: f64) -> Result<f64> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(contract(format!("exponential mean must be positive and finite, got {mean}")));
        }
        Ok(exponential_from_uniform(mean, self.next_uniform01()))
    }

    /// Mean-1 exponential without the parameter check, for hot loops.
    #[inline]
    pub(crate) fn next_std_exponential(&mut self) -> f64 {
        -(-self.next_uniform01()).ln_1p()
    }

    /// Standard complex Gaussian: independent real and imaginary parts with
    /// variance 1/2 each, so `E|z|^2 = 1`. Box-Muller on `1 - U`.
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let u1 = 1.0 - self.next_uniform01();
        let u2 = self.next_uniform01();
        // radius^2 = -ln(u1) gives |z|^2 ~ Exp(1).
        let r = (-u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        Complex64::new(r * theta.cos(), r * theta.sin())
    }
}

/// Inverse CDF of the exponential law with the given mean.
#[inline]
pub fn exponential_from_uniform(mean: f64, u: f64) -> f64 {
    -mean * (-u).ln_1p()
}
