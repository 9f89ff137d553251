// SPDX-License-Identifier: MIT OR Apache-2.0

//! Distance-induced kernels, the double-centered Gram matrix and its spectrum.
//!
//! For a semi-metric `d` of negative type, `k(y, y') = (d(y, y0) + d(y', y0) - d(y, y')) / 2`
//! is positive definite for any anchor `y0`. Centering the Gram matrix removes
//! the anchor: `HKH = -HDH / 2`. The eigenvalues of `HKH / n` estimate the
//! spectrum that weights the limiting null of the location statistic.

use crate::data::DistanceMatrix;
use crate::error::{CpdError, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

/// Double-centered (row and column means removed) symmetric Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredGram {
    matrix: DMatrix<f64>,
}

impl CenteredGram {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }
}

/// How many leading eigenvalues feed the Monte-Carlo null.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Smallest prefix whose sum reaches `fraction` of the positive trace,
    /// never more than `cap` terms.
    TraceFraction { fraction: f64, cap: usize },
    /// Exactly the leading `m` positive eigenvalues (fewer if not available).
    Leading(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::TraceFraction {
            fraction: 0.99,
            cap: 100,
        }
    }
}

/// Descending eigenvalues of `HKH / n` with negatives floored at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSpectrum {
    pub lambdas: Vec<f64>,
    pub kept: usize,
    pub trace_fraction: f64,
}

impl EigenSpectrum {
    /// Builds a spectrum from given eigenvalues, keeping all positive ones.
    pub fn from_values(mut lambdas: Vec<f64>) -> Self {
        for v in lambdas.iter_mut() {
            *v = v.max(0.0);
        }
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let kept = lambdas.iter().take_while(|&&v| v > 0.0).count();
        Self {
            lambdas,
            kept,
            trace_fraction: 1.0,
        }
    }

    pub fn kept_values(&self) -> &[f64] {
        &self.lambdas[..self.kept]
    }
}

/// `K[i][j] = (D[i][a] + D[j][a] - D[i][j]) / 2` for anchor `a`.
pub fn distance_induced_kernel(d: &DistanceMatrix, anchor: usize) -> DMatrix<f64> {
    let n = d.n();
    assert!(anchor < n, "anchor {anchor} out of range for n = {n}");
    DMatrix::from_fn(n, n, |i, j| 0.5 * (d.get(i, anchor) + d.get(j, anchor) - d.get(i, j)))
}

/// `HKH` via explicit row, column and grand mean subtraction.
pub fn center_gram(k: &DMatrix<f64>) -> CenteredGram {
    let n = k.nrows();
    assert_eq!(n, k.ncols(), "Gram matrix must be square");
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| k.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| k.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let matrix = DMatrix::from_fn(n, n, |i, j| k[(i, j)] - row_means[i] - col_means[j] + grand);
    CenteredGram { matrix }
}

/// Centered Gram matrix of the distance-induced kernel (anchor 0).
pub fn centered_gram_from_distances(d: &DistanceMatrix) -> CenteredGram {
    center_gram(&distance_induced_kernel(d, 0))
}

/// Diagonal of the centered Gram matrix from row means alone:
/// `diag[i] = dbar_i - dbar / 2`.
pub fn diag_centered_from_distances(d: &DistanceMatrix) -> Vec<f64> {
    let n = d.n();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| d.row(i).iter().sum::<f64>() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    row_means.iter().map(|m| m - 0.5 * grand).collect()
}

/// Eigenvalues of `HKH / n`, floored at zero, sorted descending and truncated.
pub fn estimate_eigenvalues(d: &DistanceMatrix, truncation: Truncation) -> Result<EigenSpectrum> {
    let n = d.n();
    if n < 2 {
        return Err(CpdError::InvalidConfig(format!(
            "eigenvalue estimation needs n >= 2, got {n}"
        )));
    }
    let gram = centered_gram_from_distances(d);
    let scaled = gram.matrix / n as f64;
    let eig = SymmetricEigen::try_new(scaled, 1e-13, 10_000)
        .ok_or_else(|| CpdError::EigenFailure(format!("no convergence for n = {n}")))?;
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if lambdas.iter().any(|v| !v.is_finite()) {
        return Err(CpdError::EigenFailure("non-finite eigenvalue".into()));
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let top = lambdas.first().copied().unwrap_or(0.0).max(0.0);
    let noise_floor = 1e-12 * top;
    for v in lambdas.iter_mut() {
        if *v <= noise_floor {
            *v = 0.0;
        }
    }
    let positive: f64 = lambdas.iter().sum();
    let available = lambdas.iter().take_while(|&&v| v > 0.0).count();

    let kept = match truncation {
        Truncation::Leading(m) => m.min(available),
        Truncation::TraceFraction { fraction, cap } => {
            let cap = cap.min(n);
            let target = fraction * positive;
            let mut acc = 0.0;
            let mut count = 0;
            for &v in lambdas.iter().take(available) {
                if count >= cap || acc >= target {
                    break;
                }
                acc += v;
                count += 1;
            }
            count
        }
    };
    let kept_sum: f64 = lambdas[..kept].iter().sum();
    let trace_fraction = if positive > 0.0 { kept_sum / positive } else { 1.0 };
    Ok(EigenSpectrum {
        lambdas,
        kept,
        trace_fraction,
    })
}

/// Squared distance between the mean embeddings of `1..=t` and `t+1..=n`.
pub fn mean_embedding_gap_sq(cg: &CenteredGram, t: usize) -> f64 {
    let n = cg.n();
    assert!(t >= 1 && t < n, "split {t} out of range for n = {n}");
    let mut within_left = 0.0;
    let mut within_right = 0.0;
    let mut across = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = cg.get(i, j);
            match (i < t, j < t) {
                (true, true) => within_left += v,
                (false, false) => within_right += v,
                (true, false) => across += v,
                (false, true) => {}
            }
        }
    }
    let tf = t as f64;
    let rf = (n - t) as f64;
    within_left / (tf * tf) + within_right / (rf * rf) - 2.0 * across / (tf * rf)
}
