// SPDX-License-Identifier: MIT OR Apache-2.0

mod common;

use common::*;
use proptest::prelude::*;
use wgcpd::kernel::{centered_gram_from_distances, mean_embedding_gap_sq};
use wgcpd::scan::{moments, ScanProfile, Statistic};
use wgcpd::{DistanceMatrix, ScanWindow, WindowBounds};

fn full_bounds(n: usize) -> WindowBounds {
    WindowBounds::explicit(n, 2, n - 2).unwrap()
}

fn matrix_strategy(max_n: usize) -> impl Strategy<Value = DistanceMatrix> {
    (6..=max_n).prop_flat_map(|n| {
        prop::collection::vec(0.0f64..10.0, n * (n - 1) / 2).prop_map(move |upper| {
            let mut it = upper.into_iter();
            DistanceMatrix::from_upper_fn(n, |_, _| it.next().unwrap())
        })
    })
}

fn points_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (6usize..=20, 1usize..=4).prop_flat_map(|(n, dim)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, dim), n)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_brute_force(d in matrix_strategy(15)) {
        let bounds = full_bounds(d.n());
        let p = ScanProfile::build(&d, bounds);
        let scale = d.total() / (d.n() * d.n()) as f64;
        for row in brute_rows(&d, bounds) {
            let t = row.t;
            prop_assert!(close(p.d_a(t), row.a, 1e-9, scale));
            prop_assert!(close(p.d_b1(t), row.b1, 1e-9, scale));
            prop_assert!(close(p.d_b2(t), row.b2, 1e-9, scale));
            prop_assert!(close(p.t1(t), row.t1, 1e-9, scale));
            prop_assert!(close(p.t1_tilde(t), row.t1_tilde, 1e-9, scale));
            prop_assert!(close(p.t2(t), row.t2, 1e-9, scale));
            prop_assert!(close(p.t2_tilde(t), row.t2_tilde, 1e-9, scale));
        }
        let m = moments(&d);
        let b = brute_moments(&d);
        prop_assert!(close(m.m2, b.m2, 1e-9, scale));
        prop_assert!(close(m.m4, b.m4, 1e-9, scale * scale));
        prop_assert!(close(m.m6, b.m6, 1e-9, scale.powi(3)));
        prop_assert!(close(m.s_hat, b.s_hat, 1e-9, scale));
        for (which, (value, argmax)) in Statistic::ALL.into_iter().zip(brute_stats(&d, bounds)) {
            let s = p.statistic(which).unwrap();
            prop_assert!(close(s.value, value, 1e-9, 1e-12), "{which}: {} vs {value}", s.value);
            prop_assert_eq!(s.argmax, argmax);
        }
    }

    #[test]
    fn sums_partition_and_are_monotone(d in matrix_strategy(15)) {
        let p = ScanProfile::build(&d, full_bounds(d.n()));
        let mut last = (f64::NEG_INFINITY, f64::INFINITY);
        for t in p.splits() {
            let total = p.d_b1(t) + p.d_b2(t) + 2.0 * p.d_a(t);
            prop_assert!((total - p.d_total()).abs() <= 1e-9 * p.d_total().max(1.0));
            prop_assert!(p.d_b1(t) >= last.0 && p.d_b2(t) <= last.1);
            last = (p.d_b1(t), p.d_b2(t));
        }
    }

    #[test]
    fn gap_is_nonnegative_and_matches_kernel(points in points_strategy()) {
        let d = sq_euclidean(&points);
        let p = ScanProfile::build(&d, full_bounds(d.n()));
        let cg = centered_gram_from_distances(&d);
        let scale = d.total() / (d.n() * d.n()) as f64;
        for t in p.splits() {
            prop_assert!(p.t1_tilde(t) >= -1e-9 * scale.max(1.0));
            prop_assert!(close(p.t1_tilde(t), mean_embedding_gap_sq(&cg, t), 1e-8, scale));
        }
    }

    #[test]
    fn moments_are_permutation_invariant(d in matrix_strategy(12), seed in any::<u64>()) {
        let mut rng = rng(seed);
        let perm = wgcpd::null::random_permutation(&mut rng, d.n());
        let a = moments(&d);
        let b = moments(&d.permuted(&perm));
        let scale = d.total() / (d.n() * d.n()) as f64;
        prop_assert!(close(a.m2, b.m2, 1e-12, scale));
        prop_assert!(close(a.m4, b.m4, 1e-12, scale * scale));
        prop_assert!(close(a.m6, b.m6, 1e-12, scale.powi(3)));
        prop_assert!(close(a.s_hat, b.s_hat, 1e-9, scale));
    }

    #[test]
    fn scale_equivariance(d in matrix_strategy(15), c in 0.01f64..50.0) {
        let w = ScanWindow::default();
        let p = ScanProfile::build(&d, w.bounds(d.n()).unwrap());
        let q = ScanProfile::build(&d.scaled(c), w.bounds(d.n()).unwrap());
        let (a, b) = (p.moments(), q.moments());
        let s = d.total() / (d.n() * d.n()) as f64;
        prop_assert!(close(b.m2, c * a.m2, 1e-12, c * s));
        prop_assert!(close(b.m4, c * c * a.m4, 1e-12, c * c * s * s));
        prop_assert!(close(b.m6, c.powi(3) * a.m6, 1e-12, (c * s).powi(3)));
        prop_assert!(close(b.s_hat, c * a.s_hat, 1e-9, c * s));
        for which in Statistic::ALL {
            let x = p.statistic(which).unwrap();
            let y = q.statistic(which).unwrap();
            let factor = if which.needs_dispersion() { 1.0 } else { c };
            prop_assert!(close(y.value, factor * x.value, 1e-9, factor * 1e-9));
            prop_assert_eq!(x.argmax, y.argmax);
        }
    }

    #[test]
    fn reversal_mirrors_s2(d in matrix_strategy(15)) {
        let n = d.n();
        let rev: Vec<usize> = (0..n).rev().collect();
        let bounds = full_bounds(n);
        let p = ScanProfile::build(&d, bounds);
        let q = ScanProfile::build(&d.permuted(&rev), bounds);
        for t in p.splits() {
            let a = p.score(Statistic::S2, t).unwrap();
            let b = q.score(Statistic::S2, n - t).unwrap();
            prop_assert!(close(a, b, 1e-9, 1e-12));
        }
        let scores = p.scores(Statistic::S2).unwrap();
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let unique = scores.iter().filter(|&&s| s >= best * (1.0 - 1e-9)).count() == 1;
        if unique {
            let x = p.statistic(Statistic::S2).unwrap().argmax;
            let y = q.statistic(Statistic::S2).unwrap().argmax;
            prop_assert_eq!(y, n - x);
        }
    }
}

#[test]
fn dispersion_matches_kernel_diagonal() {
    let mut r = rng(21);
    let d = sq_euclidean(&gaussian_points(30, 3, &mut r));
    let diag = centered_gram_from_distances(&d).diagonal();
    let mean = diag.iter().sum::<f64>() / 30.0;
    let var = diag.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 30.0;
    let s = moments(&d).s_hat;
    assert!((s * s - var).abs() < 1e-10 * var.max(1.0));
}
