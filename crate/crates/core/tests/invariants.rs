//! Statistical invariants checked across modules at desk scale.

use num_complex::Complex64;

use cesaro_lab::batch::map_tasks;
use cesaro_lab::cesaro::sample_cesaro_path;
use cesaro_lab::graph::estimate_frequencies;
use cesaro_lab::restriction::rejection_sample;
use cesaro_lab::simplex::{phi_forward, sample_ordered_simplex, SimplexMethod};
use cesaro_lab::stats::{correlation, ks_one_sample, ks_two_sample};
use cesaro_lab::wishart::{sample_wishart_spectral_path, WishartPathState};
use cesaro_lab::{ConeKind, FrequencyVector, PathWindow, RandomStream};

const WORKERS: usize = 4;

fn freq(v: &[f64]) -> FrequencyVector {
    FrequencyVector::new(v.to_vec()).unwrap()
}

fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

fn exp_cdf(mean: f64) -> impl Fn(f64) -> f64 {
    move |x| if x <= 0.0 { 0.0 } else { 1.0 - (-x / mean).exp() }
}

#[test]
fn pushforward_is_uniform_with_uncorrelated_coordinates() {
    let (n, a, samples) = (100, 100.0, 10_000);
    let root = RandomStream::new(21, 0);
    let rows: Vec<Vec<f64>> = map_tasks(&root, samples, WORKERS, |_, mut s| {
        let p = sample_ordered_simplex(n, a, &mut s, SimplexMethod::SortUniforms).unwrap();
        phi_forward(&p).unwrap()
    });
    let cols: Vec<Vec<f64>> = (0..n).map(|j| column(&rows, j)).collect();
    for (j, c) in cols.iter().enumerate() {
        let ks = ks_one_sample(c, |t| t.clamp(0.0, 1.0)).unwrap();
        assert!(ks < 0.02, "coordinate {j}: KS {ks}");
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max(correlation(&cols[i], &cols[j]).unwrap().abs());
        }
    }
    assert!(worst < 0.05, "max pairwise |correlation| {worst}");
}

#[test]
fn cesaro_increments_are_memoryless() {
    let (k, samples) = (25, 10_000);
    let root = RandomStream::new(22, 0);
    let incs: Vec<Vec<f64>> =
        map_tasks(&root, samples, WORKERS, |_, mut s| sample_cesaro_path(1.5, k + 1, &mut s).unwrap().increments());
    let ks = ks_two_sample(&column(&incs, 0), &column(&incs, k)).unwrap();
    assert!(ks < 0.03, "KS {ks}");
}

#[test]
fn simplex_window_matches_cesaro_window() {
    let (lambda, n, samples) = (2.0, 2000, 10_000);
    let a = n as f64 * lambda;
    let simplex = RandomStream::new(23, 0);
    let cesaro = RandomStream::new(23, 1);
    let s_incs: Vec<Vec<f64>> = map_tasks(&simplex, samples, WORKERS, |_, mut s| {
        let p = sample_ordered_simplex(n, a, &mut s, SimplexMethod::SortUniforms).unwrap();
        p.increments()[..3].to_vec()
    });
    let c_incs: Vec<Vec<f64>> =
        map_tasks(&cesaro, samples, WORKERS, |_, mut s| sample_cesaro_path(lambda, 3, &mut s).unwrap().increments());
    for j in 0..3 {
        let ks = ks_two_sample(&column(&s_incs, j), &column(&c_incs, j)).unwrap();
        assert!(ks < 0.03, "increment {j}: KS {ks}");
    }
}

#[test]
fn restriction_preserves_frequencies() {
    let lambdas = freq(&[1.0, 3.0]);
    let root = RandomStream::new(24, 0);
    let paths: Vec<PathWindow> = map_tasks(&root, 600, WORKERS, |_, mut s| {
        rejection_sample(&lambdas, ConeKind::GelfandTsetlin, 200, &mut s, 100_000)
            .unwrap()
            .accepted_path
            .unwrap()
    });
    assert!(paths.len() >= 500);
    let mut mean = [0.0; 2];
    for p in &paths {
        let est = estimate_frequencies(p).unwrap();
        for (m, e) in mean.iter_mut().zip(est.as_slice()) {
            *m += e / paths.len() as f64;
        }
    }
    for (m, l) in mean.iter().zip([1.0, 3.0]) {
        assert!((m - l).abs() / l < 0.15, "mean estimate {mean:?}");
    }
}

/// Mid-level law of restricted paths whose level-`bin_level` vertex falls in
/// the bin, for paths restricted up to `depth`.
fn binned_mid_level(root: &RandomStream, bin_level: usize, depth: usize, attempts: usize) -> Vec<Vec<f64>> {
    let lambdas = freq(&[1.0, 3.0]);
    let (lo, hi) = ([18.0, 54.0], [22.0, 66.0]);
    map_tasks(root, attempts, WORKERS, |_, mut s| {
        let path = rejection_sample(&lambdas, ConeKind::GelfandTsetlin, depth, &mut s, 1)
            .unwrap()
            .accepted_path?;
        let end = path.at_level(bin_level as u64).unwrap().coords();
        let inside = (0..2).all(|i| end[i] >= lo[i] && end[i] <= hi[i]);
        inside.then(|| path.at_level(bin_level as u64 / 2).unwrap().coords().to_vec())
    })
    .into_iter()
    .flatten()
    .collect()
}

#[test]
fn restricted_law_does_not_depend_on_the_tail() {
    let d = 20;
    let short = binned_mid_level(&RandomStream::new(25, 0), d, d, 60_000);
    let long = binned_mid_level(&RandomStream::new(25, 1), d, d + 10, 60_000);
    assert!(short.len() >= 1000 && long.len() >= 1000, "{} / {}", short.len(), long.len());
    for j in 0..2 {
        let ks = ks_two_sample(&column(&short, j), &column(&long, j)).unwrap();
        assert!(ks < 0.07, "coordinate {j}: KS {ks}");
    }
}

#[test]
fn rank_one_wishart_matches_cesaro() {
    let samples = 20_000;
    let w_root = RandomStream::new(26, 0);
    let c_root = RandomStream::new(26, 1);
    let lambdas = freq(&[0.7]);
    let w: Vec<f64> = map_tasks(&w_root, samples, WORKERS, |_, mut s| {
        let p = sample_wishart_spectral_path(&lambdas, 5, &mut s).unwrap();
        p.last().coords()[0]
    });
    let c: Vec<f64> =
        map_tasks(&c_root, samples, WORKERS, |_, mut s| sample_cesaro_path(0.7, 5, &mut s).unwrap().at_level(5));
    let ks = ks_two_sample(&w, &c).unwrap();
    assert!(ks < 0.03, "KS {ks}");
}

#[test]
fn scalar_wishart_law_is_unitarily_invariant() {
    let (n, samples) = (15, 10_000);
    let lambdas = freq(&[2.0, 2.0]);
    let (th, al, be) = (0.7f64, 1.1f64, -0.4f64);
    let u = [
        [Complex64::from_polar(th.cos(), al), -Complex64::from_polar(th.sin(), be)],
        [Complex64::from_polar(th.sin(), -be), Complex64::from_polar(th.cos(), -al)],
    ];
    let spectra = |root: RandomStream, rotate: bool| -> Vec<Vec<f64>> {
        map_tasks(&root, samples, WORKERS, |_, mut s| {
            let mut state = WishartPathState::new(&lambdas).unwrap();
            for _ in 0..n {
                let r = [s.next_complex_gaussian(), s.next_complex_gaussian()];
                let r = if rotate { [u[0][0] * r[0] + u[0][1] * r[1], u[1][0] * r[0] + u[1][1] * r[1]] } else { r };
                state.push_row(&r);
            }
            state.spectrum().unwrap()
        })
    };
    let plain = spectra(RandomStream::new(27, 0), false);
    let rotated = spectra(RandomStream::new(27, 1), true);
    for j in 0..2 {
        let ks = ks_two_sample(&column(&plain, j), &column(&rotated, j)).unwrap();
        assert!(ks < 0.05, "coordinate {j}: KS {ks}");
    }
}

#[test]
fn rank_one_frequency_estimate_at_depth_ten_thousand() {
    let mut s = RandomStream::new(28, 0);
    let path = sample_cesaro_path(1.0, 10_000, &mut s).unwrap();
    let window = PathWindow::from_rows(10_000, vec![vec![path.at_level(10_000)]]).unwrap();
    let est = estimate_frequencies(&window).unwrap().as_slice()[0];
    assert!((0.9..=1.1).contains(&est), "estimate {est}");
    let incs = path.increments();
    assert!(ks_one_sample(&incs, exp_cdf(1.0)).unwrap() < 0.02);
}
