// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reference implementations written straight from the set definitions,
//! without the incremental sums used by the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wgcpd::{DistanceMatrix, WindowBounds};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with i.i.d. uniform off-diagonal entries in `[0, 5)`.
pub fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    DistanceMatrix::from_upper_fn(n, |_, _| rng.random::<f64>() * 5.0)
}

/// Squared Euclidean distances of Gaussian points in `R^dim`.
pub fn gaussian_points(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect()
}

pub fn sq_euclidean(points: &[Vec<f64>]) -> DistanceMatrix {
    DistanceMatrix::from_upper_fn(points.len(), |i, j| {
        points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b).powi(2))
            .sum()
    })
}

#[derive(Clone, Copy, Debug)]
pub struct BruteRow {
    pub t: usize,
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
    pub t1: f64,
    pub t1_tilde: f64,
    pub t2: f64,
    pub t2_tilde: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct BruteMoments {
    pub m2: f64,
    pub m4: f64,
    pub m6: f64,
    pub s_hat: f64,
}

pub fn brute_moments(d: &DistanceMatrix) -> BruteMoments {
    let n = d.n();
    let nf = n as f64;
    let mut off = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off += d.get(i, j);
            }
        }
    }
    let m2 = off / (2.0 * nf * nf);
    let dbar = off / (nf * nf);
    let mut m4 = 0.0;
    let mut m6 = 0.0;
    let mut sq = 0.0;
    for i in 0..n {
        let di: f64 = (0..n).map(|j| d.get(i, j)).sum::<f64>() / nf;
        let c = 2.0 * di - dbar;
        m4 += c.powi(2);
        m6 += c.powi(3);
        sq += di * di;
    }
    BruteMoments {
        m2,
        m4: m4 / (4.0 * nf),
        m6: m6 / (8.0 * nf),
        s_hat: (sq / nf - dbar * dbar).max(0.0).sqrt(),
    }
}

/// Every split in `bounds`, each sum taken over its defining pair set.
pub fn brute_rows(d: &DistanceMatrix, bounds: WindowBounds) -> Vec<BruteRow> {
    let n = d.n();
    let m2 = brute_moments(d).m2;
    (bounds.n0..=bounds.n1)
        .map(|t| {
            let mut a = 0.0;
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            let (mut na, mut nb1, mut nb2) = (0usize, 0usize, 0usize);
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    if i < t && j < t {
                        b1 += d.get(i, j);
                        nb1 += 1;
                    } else if i >= t && j >= t {
                        b2 += d.get(i, j);
                        nb2 += 1;
                    } else if i < t {
                        a += d.get(i, j);
                        na += 1;
                    }
                }
            }
            let (tf, rf) = (t as f64, (n - t) as f64);
            assert_eq!(na, t * (n - t));
            assert_eq!(nb1, t * (t - 1));
            assert_eq!(nb2, (n - t) * (n - t - 1));
            let da = a / na as f64;
            let db1 = b1 / nb1 as f64;
            let db2 = b2 / nb2 as f64;
            let rho = tf / n as f64;
            let drift = 2.0 * m2 * (2.0 * rho - 1.0) / (n as f64 * rho * (1.0 - rho));
            BruteRow {
                t,
                a,
                b1,
                b2,
                t1: da - 0.5 * db1 - 0.5 * db2,
                t1_tilde: a / (tf * rf) - b1 / (2.0 * tf * tf) - b2 / (2.0 * rf * rf),
                t2: (db1 - db2).abs(),
                t2_tilde: (b1 / (tf * tf) - b2 / (rf * rf) - drift).abs(),
            }
        })
        .collect()
}

/// Brute-force `(value, argmax)` of the five statistics, in the order
/// S1, S1t, S2, S2t, S3.
pub fn brute_stats(d: &DistanceMatrix, bounds: WindowBounds) -> [(f64, usize); 5] {
    let n = d.n() as f64;
    let s = brute_moments(d).s_hat;
    let rows = brute_rows(d, bounds);
    let score = |k: usize, r: &BruteRow| {
        let w = r.t as f64 * (n - r.t as f64) / n;
        match k {
            0 => w * r.t1,
            1 => w * r.t1_tilde,
            2 => w.sqrt() * r.t2 / (2.0 * s),
            3 => w.sqrt() * r.t2_tilde / (2.0 * s),
            _ => w * (4.0 * r.t1 * r.t1 + r.t2 * r.t2) / (4.0 * s * s),
        }
    };
    let mut out = [(f64::NEG_INFINITY, 0usize); 5];
    for (k, slot) in out.iter_mut().enumerate() {
        for r in &rows {
            let v = score(k, r);
            if v > slot.0 {
                *slot = (v, r.t);
            }
        }
    }
    out
}

/// `|x - y| <= tol * max(|x|, |y|, scale)`.
pub fn close(x: f64, y: f64, tol: f64, scale: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(scale)
}

pub fn rel_err(x: f64, y: f64, scale: f64) -> f64 {
    (x - y).abs() / x.abs().max(y.abs()).max(scale)
}

/// Kolmogorov-Smirnov distance of a sample from U(0, 1).
pub fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = (x - i as f64 / n).abs();
            let hi = ((i + 1) as f64 / n - x).abs();
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}
