//! Spectral paths of nested minors of rank-d Wishart matrices.
//!
//! For `A = sum_i lambda_i xi_i xi_i^*` with standard complex Gaussian
//! `xi_i`, the principal `n x n` minor is `A_n = X Λ X^*`, where `X` is the
//! `n x d` matrix whose rows are the first `n` coordinates of the `xi_i`.
//! Its nonzero spectrum equals the spectrum of the `d x d` Gram matrix
//! `Λ^{1/2} X^* X Λ^{1/2}`, which grows by one rank-one term per level. A
//! path to level `n` therefore costs `n` small eigensolves instead of
//! eigensolves of growing size.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{contract, Error, Result};
use crate::graph::{ConeKind, FrequencyVector, PathWindow, Vertex};
use crate::rng::RandomStream;

/// Relative tolerance for interlacing checks on computed spectra.
pub const INTERLACING_TOL: f64 = 1e-8;
/// Relative asymmetry above which input is rejected as non-Hermitian.
const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal size, relative to the matrix scale, at which Jacobi stops.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSmall {
    d: usize,
    entries: Vec<Complex64>,
}

impl HermitianSmall {
    pub fn zeros(d: usize) -> Self {
        Self { d, entries: vec![Complex64::new(0.0, 0.0); d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.entries[i * d + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Validates conjugate symmetry up to `1e-10` of the matrix scale.
    pub fn from_entries(d: usize, entries: Vec<Complex64>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(contract(format!("expected {d}x{d} entries, got {}", entries.len())));
        }
        let m = Self { d, entries };
        let scale = m.scale().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in i..d {
                let asym = (m.get(i, j) - m.get(j, i).conj()).norm();
                if asym > HERMITIAN_TOL * scale {
                    return Err(contract(format!(
                        "matrix is not Hermitian: |a[{i}][{j}] - conj(a[{j}][{i}])| = {asym:e}"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// Builds from real rows, e.g. `[[2,1],[1,2]]`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let d = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_entries(d, entries)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.d + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|i| self.get(i, i).re).sum()
    }

    /// Frobenius norm, the scale used by every relative tolerance here.
    fn scale(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self += v v^*` where `(v v^*)_{ij} = v_i conj(v_j)`.
    pub fn add_outer(&mut self, v: &[Complex64]) {
        let d = self.d;
        for i in 0..d {
            for j in 0..d {
                self.entries[i * d + j] += v[i] * v[j].conj();
            }
        }
    }
}

/// Eigenvalues in ascending order by the cyclic complex Jacobi method.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// a real plane rotation that annihilates it. Sweeps continue until every
/// off-diagonal magnitude is below `1e-12` times the Frobenius norm.
pub fn hermitian_eigenvalues(h: &HermitianSmall) -> Result<Vec<f64>> {
    let d = h.d;
    let mut a = h.entries.clone();
    for i in 0..d {
        a[i * d + i] = Complex64::new(a[i * d + i].re, 0.0);
    }
    let tol = JACOBI_TOL * h.scale();
    let off_max = |a: &[Complex64]| {
        let mut m: f64 = 0.0;
        for p in 0..d {
            for q in p + 1..d {
                m = m.max(a[p * d + q].norm());
            }
        }
        m
    };
    let mut sweeps = 0;
    loop {
        let off = off_max(&a);
        if off <= tol {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[p * d + q];
                let m = apq.norm();
                if m <= tol * 1e-3 {
                    continue;
                }
                let phase = apq / m;
                let (app, aqq) = (a[p * d + p].re, a[q * d + q].re);
                let theta = 0.5 * (2.0 * m).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on (p, q).
                let gpp = Complex64::new(c, 0.0);
                let gpq = Complex64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..d {
                    let (akp, akq) = (a[k * d + p], a[k * d + q]);
                    a[k * d + p] = akp * gpp + akq * gqp;
                    a[k * d + q] = akp * gpq + akq * gqq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[p * d + k], a[q * d + k]);
                    a[p * d + k] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[q * d + k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[p * d + q] = Complex64::new(0.0, 0.0);
                a[q * d + p] = Complex64::new(0.0, 0.0);
                a[p * d + p] = Complex64::new(a[p * d + p].re, 0.0);
                a[q * d + q] = Complex64::new(a[q * d + q].re, 0.0);
            }
        }
    }
    let mut eig: Vec<f64> = (0..d).map(|i| a[i * d + i].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Gram matrix of the first `level` Gaussian rows, weighted by `Λ^{1/2}`.
#[derive(Debug, Clone)]
pub struct WishartPathState {
    lambdas: FrequencyVector,
    sqrt_lambdas: Vec<f64>,
    level: u64,
    gram: HermitianSmall,
}

impl WishartPathState {
    pub fn new(lambdas: &FrequencyVector) -> Result<Self> {
        if lambdas.as_slice().iter().any(|&l| !(l > 0.0)) {
            return Err(Error::Precondition(format!(
                "Wishart frequencies must be strictly positive, got {:?}",
                lambdas.as_slice()
            )));
        }
        let d = lambdas.dim();
        Ok(Self {
            lambdas: lambdas.clone(),
            sqrt_lambdas: lambdas.as_slice().iter().map(|l| l.sqrt()).collect(),
            level: 0,
            gram: HermitianSmall::zeros(d),
        })
    }

    pub fn lambdas(&self) -> &FrequencyVector {
        &self.lambdas
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn gram(&self) -> &HermitianSmall {
        &self.gram
    }

    /// Adds the row `r` (before `Λ^{1/2}` weighting) without drawing it.
    pub fn push_row(&mut self, r: &[Complex64]) {
        let w: Vec<Complex64> = r.iter().zip(&self.sqrt_lambdas).map(|(z, s)| z * s).collect();
        self.gram.add_outer(&w);
        self.level += 1;
    }

    /// Ascending spectrum of the current Gram matrix, clamped at zero where
    /// round-off produced tiny negatives.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let eig = hermitian_eigenvalues(&self.gram)?;
        let floor = -INTERLACING_TOL * self.gram.trace().max(f64::MIN_POSITIVE);
        if eig[0] < floor {
            return Err(Error::Domain(format!("Gram matrix not nonnegative definite: {eig:?}")));
        }
        Ok(eig.into_iter().map(|x| x.max(0.0)).collect())
    }

    pub fn vertex(&self) -> Result<Vertex> {
        Vertex::new(self.level, self.spectrum()?)
    }
}

/// Draws one Gaussian row, applies the rank-one update and returns the
/// vertex at the new level.
pub fn extend_wishart_path(state: &mut WishartPathState, stream: &mut RandomStream) -> Result<Vertex> {
    let r: Vec<Complex64> = (0..state.lambdas.dim()).map(|_| stream.next_complex_gaussian()).collect();
    state.push_row(&r);
    state.vertex()
}

/// A spectral path from level `d` to `n_max`, together with the final state.
pub fn sample_wishart_spectral_path_with_state(
    lambdas: &FrequencyVector,
    n_max: usize,
    stream: &mut RandomStream,
) -> Result<(PathWindow, WishartPathState)> {
    let d = lambdas.dim();
    if n_max < d {
        return Err(contract(format!("n_max = {n_max} must be >= d = {d}")));
    }
    let mut state = WishartPathState::new(lambdas)?;
    let mut vertices = Vec::with_capacity(n_max - d + 1);
    for n in 1..=n_max {
        if n < d {
            let r: Vec<Complex64> = (0..d).map(|_| stream.next_complex_gaussian()).collect();
            state.push_row(&r);
        } else {
            vertices.push(extend_wishart_path(&mut state, stream)?);
        }
    }
    Ok((PathWindow::new(vertices)?, state))
}

pub fn sample_wishart_spectral_path(
    lambdas: &FrequencyVector,
    n_max: usize,
    stream: &mut RandomStream,
) -> Result<PathWindow> {
    sample_wishart_spectral_path_with_state(lambdas, n_max, stream).map(|(p, _)| p)
}

/// Interlacing check between consecutive levels with tolerance
/// `INTERLACING_TOL` times the larger trace.
pub fn interlaces_tolerant(x: &Vertex, y: &Vertex) -> Result<bool> {
    let scale: f64 = y.coords().iter().sum::<f64>().max(x.coords().iter().sum());
    crate::graph::check_edge_tolerant(x, y, ConeKind::GelfandTsetlin, INTERLACING_TOL * scale)
}

/// Number of consecutive-level pairs that fail [`interlaces_tolerant`].
pub fn count_interlacing_violations(path: &PathWindow) -> Result<usize> {
    let mut bad = 0;
    for w in path.vertices().windows(2) {
        if !interlaces_tolerant(&w[0], &w[1])? {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Row-major `[re, im]` pairs for JSON output.
#[derive(Debug, Serialize)]
pub struct GramJson {
    pub path_id: usize,
    pub d: usize,
    pub level: u64,
    pub gram: Vec<[f64; 2]>,
}

impl GramJson {
    pub fn new(path_id: usize, state: &WishartPathState) -> Self {
        Self {
            path_id,
            d: state.gram.d,
            level: state.level,
            gram: state.gram.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::ks_one_sample;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn eigenvalue_examples() {
        let e = hermitian_eigenvalues(&HermitianSmall::identity(3)).unwrap();
        assert!(close(&e, &[1.0, 1.0, 1.0], 1e-15));
        let m = HermitianSmall::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        assert!(close(&hermitian_eigenvalues(&m).unwrap(), &[1.0, 3.0], 1e-14));
        let m = HermitianSmall::from_entries(2, vec![c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0)]).unwrap();
        assert!(close(&hermitian_eigenvalues(&m).unwrap(), &[-1.0, 1.0], 1e-14));
    }

    #[test]
    fn non_hermitian_rejected() {
        let r = HermitianSmall::from_entries(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::Contract(_))));
        assert!(HermitianSmall::from_real_rows(&[&[1.0, 2.0], &[2.1, 1.0]]).is_err());
    }

    #[test]
    fn jacobi_matches_invariants_on_random_matrices() {
        // Oracle: the trace and the Frobenius norm are the first two power sums.
        let mut s = RandomStream::new(61, 0);
        for d in 1..=6 {
            for _ in 0..50 {
                let mut h = HermitianSmall::zeros(d);
                for _ in 0..d + 2 {
                    let v: Vec<Complex64> = (0..d).map(|_| s.next_complex_gaussian()).collect();
                    h.add_outer(&v);
                }
                for i in 0..d {
                    h.entries[i * d + i] -= c(1.5, 0.0);
                }
                let e = hermitian_eigenvalues(&h).unwrap();
                let tr: f64 = e.iter().sum();
                let fro2: f64 = e.iter().map(|x| x * x).sum();
                assert!((tr - h.trace()).abs() < 1e-10 * h.scale().max(1.0));
                assert!((fro2 - h.scale().powi(2)).abs() < 1e-9 * h.scale().powi(2).max(1.0));
                assert!(e.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn rank_one_increments_are_exponential() {
        let lam = FrequencyVector::new(vec![1.0]).unwrap();
        let mut s = RandomStream::new(62, 0);
        let p = sample_wishart_spectral_path(&lam, 100_000, &mut s).unwrap();
        let mut prev = 0.0;
        let inc: Vec<f64> = p
            .vertices()
            .iter()
            .map(|v| {
                let y = v.coords()[0] - prev;
                prev = v.coords()[0];
                y
            })
            .collect();
        assert_eq!(p.start_level(), 1);
        let ks = ks_one_sample(&inc, |x| 1.0 - (-x).exp()).unwrap();
        assert!(ks < 0.0061, "ks {ks}");
    }

    #[test]
    fn rank_two_path_interlaces_and_keeps_trace() {
        let lam = FrequencyVector::new(vec![1.0, 3.0]).unwrap();
        let mut s = RandomStream::new(63, 0);
        let mut state = WishartPathState::new(&lam).unwrap();
        let mut prev: Option<Vertex> = None;
        for _ in 0..300 {
            let v = extend_wishart_path(&mut state, &mut s).unwrap();
            let tr = state.gram().trace();
            let sum: f64 = v.coords().iter().sum();
            assert!((sum - tr).abs() <= 1e-8 * tr);
            if let Some(p) = &prev {
                if p.level() >= 2 {
                    assert!(interlaces_tolerant(p, &v).unwrap());
                }
                assert!(v.coords()[1] >= p.coords()[1]);
            }
            prev = Some(v);
        }
    }

    #[test]
    fn gram_reduction_matches_full_minor() {
        // Oracle: the full 5x5 minor X Λ X^*, solved directly.
        let lam = [1.0, 3.0];
        let mut s = RandomStream::new(64, 0);
        for _ in 0..20 {
            let rows: Vec<Vec<Complex64>> =
                (0..5).map(|_| (0..2).map(|_| s.next_complex_gaussian()).collect()).collect();
            let mut full = vec![c(0.0, 0.0); 25];
            for i in 0..5 {
                for j in 0..5 {
                    full[i * 5 + j] = (0..2).map(|k| rows[i][k] * lam[k] * rows[j][k].conj()).sum();
                }
            }
            let full = HermitianSmall::from_entries(5, full).unwrap();
            let mut big = hermitian_eigenvalues(&full).unwrap();
            let mut state = WishartPathState::new(&FrequencyVector::new(lam.to_vec()).unwrap()).unwrap();
            for r in &rows {
                state.push_row(r);
            }
            let small = hermitian_eigenvalues(state.gram()).unwrap();
            let scale = full.trace();
            assert!(big[..3].iter().all(|x| x.abs() < 1e-10 * scale));
            big.drain(..3);
            assert!(close(&big, &small, 1e-10 * scale), "{big:?} vs {small:?}");
        }
    }

    #[test]
    fn path_preconditions() {
        let mut s = RandomStream::new(0, 0);
        let lam = FrequencyVector::new(vec![1.0, 3.0]).unwrap();
        assert!(sample_wishart_spectral_path(&lam, 1, &mut s).is_err());
        let zero = FrequencyVector::new(vec![0.0, 3.0]).unwrap();
        assert!(matches!(sample_wishart_spectral_path(&zero, 5, &mut s), Err(Error::Precondition(_))));
        let p = sample_wishart_spectral_path(&lam, 10, &mut s).unwrap();
        assert_eq!(p.start_level(), 2);
        assert_eq!(p.last().level(), 10);
    }
}
