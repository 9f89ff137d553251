// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the detection pipeline.
#[derive(Debug, Error)]
pub enum CpdError {
    #[error("sequence mixes observation kinds (item {index} is {found}, expected {expected})")]
    MixedKinds {
        index: usize,
        expected: &'static str,
        found: &'static str,
    },
    #[error("dimension mismatch at item {index}: expected {expected}, found {found}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("graph adjacency is invalid: {0}")]
    AsymmetricAdjacency(String),
    #[error("sequence too short: n = {n}, need at least 4")]
    TooShort { n: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("distance matrix is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("negative distance d[{i}][{j}] = {value}")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal d[{i}][{i}] = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("asymmetric distance: |d[{i}][{j}] - d[{j}][{i}]| = {diff:e}")]
    AsymmetryBeyondTolerance { i: usize, j: usize, diff: f64 },

    #[error("metric {metric} cannot be applied to {kind} observations")]
    KindMismatch {
        metric: &'static str,
        kind: &'static str,
    },
    #[error("linear system is numerically singular")]
    SingularSystem,
    #[error("negative affinity entry {value:e}")]
    NegativeAffinity { value: f64 },
    #[error("eigen decomposition failed: {0}")]
    EigenFailure(String),

    #[error("invalid scan window: {0}")]
    InvalidWindow(String),
    #[error("sub-interval ({l}, {r}] is too short for a scan")]
    SubintervalTooShort { l: usize, r: usize },
    #[error("degenerate dispersion: s_hat = {s_hat:e}")]
    DegenerateDispersion { s_hat: f64 },
    #[error("eigen spectrum is empty (no positive eigenvalues kept)")]
    EmptySpectrum,

    #[error("invalid partition: {0}")]
    PartitionInvalid(String),
    #[error("change point {cp} out of range (1..{n})")]
    OutOfRange { cp: usize, n: usize },
    #[error("change points are not strictly increasing")]
    NotSorted,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl CpdError {
    /// Process exit code for the command-line tool.
    ///
    /// 1 input/config error, 2 degenerate statistic, 3 internal numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CpdError::DegenerateDispersion { .. } => 2,
            CpdError::SingularSystem
            | CpdError::NegativeAffinity { .. }
            | CpdError::EigenFailure(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CpdError>;
