// SPDX-License-Identifier: MIT OR Apache-2.0

//! Observation sequences, distance matrices and scan windows.

use crate::error::{CpdError, Result};
use serde::{Deserialize, Serialize};

/// Symmetric tolerance used when loading a distance matrix.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Diagonal entries smaller than this in magnitude are repaired to zero.
pub const DIAGONAL_TOL: f64 = 1e-12;
/// Smallest admissible sequence length.
pub const MIN_SEQUENCE_LEN: usize = 4;

/// Undirected simple graph stored as a dense 0/1 adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    nodes: usize,
    adjacency: Vec<u8>,
}

impl Graph {
    /// Builds a graph from a row-major adjacency, checking symmetry,
    /// the zero diagonal and that every entry is 0 or 1.
    pub fn new(nodes: usize, adjacency: Vec<u8>) -> Result<Self> {
        if adjacency.len() != nodes * nodes {
            return Err(CpdError::AsymmetricAdjacency(format!(
                "expected {} entries for {nodes} nodes, got {}",
                nodes * nodes,
                adjacency.len()
            )));
        }
        for i in 0..nodes {
            if adjacency[i * nodes + i] != 0 {
                return Err(CpdError::AsymmetricAdjacency(format!(
                    "self loop on node {i}"
                )));
            }
            for j in 0..nodes {
                let a = adjacency[i * nodes + j];
                if a > 1 {
                    return Err(CpdError::AsymmetricAdjacency(format!(
                        "entry ({i},{j}) = {a} is not 0/1"
                    )));
                }
                if a != adjacency[j * nodes + i] {
                    return Err(CpdError::AsymmetricAdjacency(format!(
                        "entries ({i},{j}) and ({j},{i}) differ"
                    )));
                }
            }
        }
        Ok(Self { nodes, adjacency })
    }

    /// Graph with no edges.
    pub fn empty(nodes: usize) -> Self {
        Self {
            nodes,
            adjacency: vec![0; nodes * nodes],
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.nodes + j] == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        let row = &self.adjacency[i * self.nodes..(i + 1) * self.nodes];
        row.iter().map(|&a| a as usize).sum()
    }

    pub fn adjacency(&self) -> &[u8] {
        &self.adjacency
    }
}

/// One element of an observed sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Observation {
    Vector(Vec<f64>),
    Graph(Graph),
    /// Samples of a function on an equally spaced grid; the interval is a
    /// property of the metric, not of the sample.
    Function(Vec<f64>),
}

impl Observation {
    pub fn kind(&self) -> &'static str {
        match self {
            Observation::Vector(_) => "vector",
            Observation::Graph(_) => "graph",
            Observation::Function(_) => "function",
        }
    }

    /// Dimension, node count or grid length depending on the kind.
    pub fn size(&self) -> usize {
        match self {
            Observation::Vector(v) | Observation::Function(v) => v.len(),
            Observation::Graph(g) => g.nodes(),
        }
    }
}

/// A validated, time-ordered sequence of observations of a single kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    items: Vec<Observation>,
}

impl Sequence {
    pub fn new(items: Vec<Observation>) -> Result<Self> {
        validate_sequence(Self { items })
    }

    pub fn items(&self) -> &[Observation] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Copy of the observations in `(l, r]` (0-based half-open `l..r`).
    pub fn slice(&self, l: usize, r: usize) -> Vec<Observation> {
        self.items[l..r].to_vec()
    }
}

/// Checks kind and dimension homogeneity, graph validity and the minimum length.
pub fn validate_sequence(seq: Sequence) -> Result<Sequence> {
    let n = seq.items.len();
    if n < MIN_SEQUENCE_LEN {
        return Err(CpdError::TooShort { n });
    }
    let first = &seq.items[0];
    for (index, item) in seq.items.iter().enumerate() {
        if std::mem::discriminant(item) != std::mem::discriminant(first) {
            return Err(CpdError::MixedKinds {
                index,
                expected: first.kind(),
                found: item.kind(),
            });
        }
        if item.size() != first.size() {
            return Err(CpdError::DimensionMismatch {
                index,
                expected: first.size(),
                found: item.size(),
            });
        }
        if let Observation::Graph(g) = item {
            // Graphs built through `Graph::new` are already valid; deserialized
            // ones are not.
            Graph::new(g.nodes, g.adjacency.clone())?;
        }
    }
    Ok(seq)
}

/// Dense symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from `f(i, j)` evaluated on the strict upper triangle.
    pub fn from_upper_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from a full row-major buffer, applying the load-time checks.
    ///
    /// Diagonal entries within `DIAGONAL_TOL` of zero are zeroed, off-diagonal
    /// pairs within `SYMMETRY_TOL` are replaced by their average; anything
    /// beyond those tolerances is an error.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != n {
                return Err(CpdError::NotSquare {
                    row,
                    expected: n,
                    found: values.len(),
                });
            }
            data.extend(values);
        }
        for i in 0..n {
            let d = data[i * n + i];
            if !d.is_finite() || d.abs() > DIAGONAL_TOL {
                return Err(CpdError::NonzeroDiagonal { i, value: d });
            }
            data[i * n + i] = 0.0;
        }
        for i in 0..n {
            for j in 0..n {
                let v = data[i * n + j];
                if v.is_nan() || v < 0.0 {
                    return Err(CpdError::NegativeEntry { i, j, value: v });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                let diff = (a - b).abs();
                if diff > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(CpdError::AsymmetryBeyondTolerance { i, j, diff });
                }
                let avg = 0.5 * (a + b);
                data[i * n + j] = avg;
                data[j * n + i] = avg;
            }
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Sum over all ordered off-diagonal pairs.
    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Every entry multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Matrix of the relabelled sequence: entry `(i, j)` is `d[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for &pi in perm {
            let row = self.row(pi);
            data.extend(perm.iter().map(|&pj| row[pj]));
        }
        Self { n, data }
    }

    /// Sub-matrix for observations `l..r` (0-based, half-open).
    pub fn submatrix(&self, l: usize, r: usize) -> Self {
        assert!(l <= r && r <= self.n, "submatrix bounds out of range");
        let m = r - l;
        let mut data = Vec::with_capacity(m * m);
        for i in l..r {
            data.extend_from_slice(&self.row(i)[l..r]);
        }
        Self { n: m, data }
    }
}

/// Candidate-change-point restriction given as fractions of the sequence length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub rho0: f64,
    pub rho1: f64,
}

impl Default for ScanWindow {
    fn default() -> Self {
        Self {
            rho0: 0.1,
            rho1: 0.9,
        }
    }
}

/// Resolved integer window `[n0, n1]` for a sequence of length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowBounds {
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
}

impl WindowBounds {
    /// Number of candidate split points.
    pub fn len(&self) -> usize {
        self.n1 - self.n0 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: usize) -> bool {
        (self.n0..=self.n1).contains(&t)
    }

    pub fn single(n: usize, t: usize) -> Result<Self> {
        Self::explicit(n, t, t)
    }

    /// Window with explicit integer limits, validated against `2 <= n0 <= n1 <= n - 2`.
    pub fn explicit(n: usize, n0: usize, n1: usize) -> Result<Self> {
        if n < MIN_SEQUENCE_LEN || n0 < 2 || n0 > n1 || n1 + 2 > n {
            return Err(CpdError::InvalidWindow(format!(
                "need 2 <= n0 <= n1 <= n-2, got n0={n0}, n1={n1}, n={n}"
            )));
        }
        Ok(Self { n, n0, n1 })
    }
}

fn ceil_frac(n: usize, rho: f64) -> usize {
    (n as f64 * rho - 1e-9).ceil().max(0.0) as usize
}

impl ScanWindow {
    pub fn new(rho0: f64, rho1: f64) -> Result<Self> {
        let w = Self { rho0, rho1 };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0 <= 0.5) {
            return Err(CpdError::InvalidWindow(format!(
                "rho0 must lie in (0, 0.5], got {}",
                self.rho0
            )));
        }
        if !(self.rho1 >= self.rho0 && self.rho1 < 1.0) {
            return Err(CpdError::InvalidWindow(format!(
                "rho1 must lie in [rho0, 1), got {}",
                self.rho1
            )));
        }
        Ok(())
    }

    /// Integer bounds `n0 = ceil(n rho0)`, `n1 = ceil(n rho1)`, clamped into `[2, n-2]`.
    pub fn bounds(&self, n: usize) -> Result<WindowBounds> {
        self.validate()?;
        if n < MIN_SEQUENCE_LEN {
            return Err(CpdError::TooShort { n });
        }
        let n0 = ceil_frac(n, self.rho0).max(2);
        let n1 = ceil_frac(n, self.rho1).min(n - 2);
        WindowBounds::explicit(n, n0, n1)
    }
}
