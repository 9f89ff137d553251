// SPDX-License-Identifier: MIT OR Apache-2.0

//! Semi-metrics on observations and full pairwise distance matrices.
//!
//! Squared Euclidean, squared Frobenius and the L2 functional distance are of
//! negative type, so they induce valid kernels. DELTACON is used as-is; its
//! negative-type status is not established, which is why the asymptotic
//! p-value engines warn when fed with it.

use crate::data::{DistanceMatrix, Graph, Observation, Sequence};
use crate::error::{CpdError, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Entries of a DELTACON affinity matrix in `[-NEG_AFFINITY_TOL, 0)` are clamped to 0.
pub const NEG_AFFINITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `||a - b||^2` on vectors.
    SqEuclidean,
    /// `||A - B||_F^2` on adjacency matrices.
    FrobeniusSq,
    /// `int |a(x) - b(x)|^2 dx` over an interval of the given length, by the
    /// left Riemann sum on the sample grid.
    L2Functional { interval: f64 },
    /// Matusita distance between DELTACON affinity matrices.
    DeltaCon,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::SqEuclidean => "sqeuclidean",
            Metric::FrobeniusSq => "frobenius",
            Metric::L2Functional { .. } => "l2fun",
            Metric::DeltaCon => "deltacon",
        }
    }

    /// Observation kind the metric applies to.
    pub fn kind(&self) -> &'static str {
        match self {
            Metric::SqEuclidean => "vector",
            Metric::FrobeniusSq | Metric::DeltaCon => "graph",
            Metric::L2Functional { .. } => "function",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Metric::L2Functional { interval } = self {
            if !(interval.is_finite() && *interval > 0.0) {
                return Err(CpdError::InvalidConfig(format!(
                    "functional interval length must be positive, got {interval}"
                )));
            }
        }
        Ok(())
    }

    /// Whether the metric is known to be of negative type.
    pub fn is_negative_type(&self) -> bool {
        !matches!(self, Metric::DeltaCon)
    }
}

fn mismatch(metric: &Metric, obs: &Observation) -> CpdError {
    CpdError::KindMismatch {
        metric: metric.name(),
        kind: obs.kind(),
    }
}

fn sq_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Distance between two observations under `metric`.
pub fn pairwise(metric: &Metric, a: &Observation, b: &Observation) -> Result<f64> {
    metric.validate()?;
    match (metric, a, b) {
        (Metric::SqEuclidean, Observation::Vector(x), Observation::Vector(y)) => {
            check_len(x.len(), y.len())?;
            Ok(sq_diff(x, y))
        }
        (Metric::FrobeniusSq, Observation::Graph(g), Observation::Graph(h)) => {
            check_len(g.nodes(), h.nodes())?;
            Ok(frobenius_sq(g, h))
        }
        (Metric::L2Functional { interval }, Observation::Function(x), Observation::Function(y)) => {
            check_len(x.len(), y.len())?;
            Ok(interval / x.len() as f64 * sq_diff(x, y))
        }
        (Metric::DeltaCon, Observation::Graph(g), Observation::Graph(h)) => {
            check_len(g.nodes(), h.nodes())?;
            let qg = sqrt_affinity(g)?;
            let qh = sqrt_affinity(h)?;
            Ok(matusita(&qg, &qh))
        }
        (m, _, _) if a.kind() != m.kind() => Err(mismatch(m, a)),
        (m, _, _) => Err(mismatch(m, b)),
    }
}

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(CpdError::DimensionMismatch {
            index: 1,
            expected: a,
            found: b,
        });
    }
    Ok(())
}

fn frobenius_sq(g: &Graph, h: &Graph) -> f64 {
    g.adjacency()
        .iter()
        .zip(h.adjacency())
        .filter(|(x, y)| x != y)
        .count() as f64
}

/// DELTACON affinity `Q = (I + eps^2 U - eps A)^{-1}` with `U` the degree
/// diagonal and `eps = 1 / (1 + max degree)`.
pub fn deltacon_affinity(g: &Graph) -> Result<DMatrix<f64>> {
    let m = g.nodes();
    let max_degree = (0..m).map(|k| g.degree(k)).max().unwrap_or(0);
    let eps = 1.0 / (1.0 + max_degree as f64);
    let system = DMatrix::from_fn(m, m, |i, j| {
        let mut v = if i == j {
            1.0 + eps * eps * g.degree(i) as f64
        } else {
            0.0
        };
        if g.has_edge(i, j) {
            v -= eps;
        }
        v
    });
    let lu = system.lu();
    let u = lu.u();
    let scale = u.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if (0..m).any(|k| u[(k, k)].abs() <= 1e-14 * scale.max(1.0)) {
        return Err(CpdError::SingularSystem);
    }
    let q = lu.try_inverse().ok_or(CpdError::SingularSystem)?;
    if let Some(&value) = q.iter().find(|&&v| v < -NEG_AFFINITY_TOL) {
        return Err(CpdError::NegativeAffinity { value });
    }
    Ok(q.map(|v| v.max(0.0)))
}

fn sqrt_affinity(g: &Graph) -> Result<Vec<f64>> {
    Ok(deltacon_affinity(g)?.iter().map(|v| v.sqrt()).collect())
}

fn matusita(sq_a: &[f64], sq_b: &[f64]) -> f64 {
    sq_diff(sq_a, sq_b).sqrt()
}

/// Full pairwise distance matrix of a validated sequence.
///
/// Rows are evaluated in parallel; every entry is computed by the same
/// sequential arithmetic, so the result does not depend on the schedule.
pub fn build_distance_matrix(metric: &Metric, seq: &Sequence) -> Result<DistanceMatrix> {
    metric.validate()?;
    let items = seq.items();
    let n = items.len();
    if let Some(bad) = items.iter().find(|o| o.kind() != metric.kind()) {
        return Err(mismatch(metric, bad));
    }

    let upper: Vec<Vec<f64>> = match metric {
        Metric::DeltaCon => {
            let roots: Vec<Vec<f64>> = items
                .par_iter()
                .map(|o| match o {
                    Observation::Graph(g) => sqrt_affinity(g),
                    _ => unreachable!("kind checked above"),
                })
                .collect::<Result<_>>()?;
            (0..n)
                .into_par_iter()
                .map(|i| ((i + 1)..n).map(|j| matusita(&roots[i], &roots[j])).collect())
                .collect()
        }
        _ => (0..n)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..n)
                    .map(|j| pairwise(metric, &items[i], &items[j]))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?,
    };

    Ok(DistanceMatrix::from_upper_fn(n, |i, j| upper[i][j - i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vec_obs(v: &[f64]) -> Observation {
        Observation::Vector(v.to_vec())
    }

    fn graph(m: usize, edges: &[(usize, usize)]) -> Graph {
        let mut adj = vec![0u8; m * m];
        for &(i, j) in edges {
            adj[i * m + j] = 1;
            adj[j * m + i] = 1;
        }
        Graph::new(m, adj).unwrap()
    }

    #[test]
    fn sq_euclidean_345() {
        let d = pairwise(&Metric::SqEuclidean, &vec_obs(&[0.0, 0.0]), &vec_obs(&[3.0, 4.0])).unwrap();
        assert_eq!(d, 25.0);
    }

    #[test]
    fn self_distance_is_zero() {
        let v = vec_obs(&[1.5, -2.0]);
        assert_eq!(pairwise(&Metric::SqEuclidean, &v, &v).unwrap(), 0.0);
        let f = Observation::Function(vec![0.3, 0.1, 0.7]);
        let l2 = Metric::L2Functional { interval: 2.0 };
        assert_eq!(pairwise(&l2, &f, &f).unwrap(), 0.0);
        let g = Observation::Graph(graph(4, &[(0, 1), (2, 3)]));
        assert_eq!(pairwise(&Metric::FrobeniusSq, &g, &g).unwrap(), 0.0);
        assert_eq!(pairwise(&Metric::DeltaCon, &g, &g).unwrap(), 0.0);
    }

    #[test]
    fn frobenius_one_edge() {
        let a = Observation::Graph(graph(3, &[(0, 1)]));
        let b = Observation::Graph(graph(3, &[(0, 1), (1, 2)]));
        assert_eq!(pairwise(&Metric::FrobeniusSq, &a, &b).unwrap(), 2.0);
    }

    #[test]
    fn l2_functional_riemann_sum() {
        let a = Observation::Function(vec![0.0, 1.0, 2.0, 3.0]);
        let b = Observation::Function(vec![1.0, 1.0, 1.0, 1.0]);
        // (4 / 4) * (1 + 0 + 1 + 4)
        let d = pairwise(&Metric::L2Functional { interval: 4.0 }, &a, &b).unwrap();
        assert!((d - 6.0).abs() < 1e-15);
        assert!(pairwise(&Metric::L2Functional { interval: 0.0 }, &a, &b).is_err());
    }

    #[test]
    fn kind_mismatch() {
        let v = vec_obs(&[1.0]);
        let g = Observation::Graph(graph(2, &[]));
        assert!(matches!(
            pairwise(&Metric::DeltaCon, &v, &v),
            Err(CpdError::KindMismatch { .. })
        ));
        assert!(matches!(
            pairwise(&Metric::SqEuclidean, &v, &g),
            Err(CpdError::KindMismatch { .. })
        ));
    }

    #[test]
    fn deltacon_empty_graph_is_identity() {
        let q = deltacon_affinity(&Graph::empty(4)).unwrap();
        assert_eq!(q, DMatrix::identity(4, 4));
    }

    #[test]
    fn deltacon_single_edge_closed_form() {
        // eps = 1/2: M = [[5/4, -1/2], [-1/2, 5/4]], det = 21/16.
        let q = deltacon_affinity(&graph(2, &[(0, 1)])).unwrap();
        let det = 1.25 * 1.25 - 0.25;
        let diag = 1.25 / det;
        let off = 0.5 / det;
        assert!((q[(0, 0)] - diag).abs() < 1e-14);
        assert!((q[(1, 1)] - diag).abs() < 1e-14);
        assert!((q[(0, 1)] - off).abs() < 1e-14);
        assert!((q[(1, 0)] - off).abs() < 1e-14);
    }

    #[test]
    fn deltacon_matches_elementwise_recomputation() {
        let g1 = graph(5, &[(0, 1), (1, 2), (3, 4)]);
        let g2 = graph(5, &[(0, 2), (2, 3), (3, 4), (1, 4)]);
        let q1 = deltacon_affinity(&g1).unwrap();
        let q2 = deltacon_affinity(&g2).unwrap();
        let mut acc = 0.0;
        for k in 0..5 {
            for l in 0..5 {
                let diff = q1[(k, l)].sqrt() - q2[(k, l)].sqrt();
                acc += diff * diff;
            }
        }
        let expected = acc.sqrt();
        let got = pairwise(&Metric::DeltaCon, &Observation::Graph(g1), &Observation::Graph(g2)).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!(got > 0.0);
    }

    #[test]
    fn small_matrix_by_hand() {
        let seq = Sequence::new(vec![vec_obs(&[0.0]), vec_obs(&[1.0]), vec_obs(&[3.0]), vec_obs(&[3.0])]).unwrap();
        let d = build_distance_matrix(&Metric::SqEuclidean, &seq).unwrap();
        let expected = [[0.0, 1.0, 9.0, 9.0], [1.0, 0.0, 4.0, 4.0], [9.0, 4.0, 0.0, 0.0], [9.0, 4.0, 0.0, 0.0]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d.get(i, j), expected[i][j]);
            }
        }
    }

    #[test]
    fn identical_observations_give_zero_matrix() {
        let seq = Sequence::new(vec![vec_obs(&[2.0, 1.0]); 6]).unwrap();
        let d = build_distance_matrix(&Metric::SqEuclidean, &seq).unwrap();
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_double_loop_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let items: Vec<Observation> = (0..10)
            .map(|_| vec_obs(&(0..3).map(|_| rng.random::<f64>()).collect::<Vec<_>>()))
            .collect();
        let seq = Sequence::new(items.clone()).unwrap();
        let d = build_distance_matrix(&Metric::SqEuclidean, &seq).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let (Observation::Vector(a), Observation::Vector(b)) = (&items[i], &items[j]) else {
                    unreachable!()
                };
                let mut s = 0.0;
                for k in 0..3 {
                    s += (a[k] - b[k]) * (a[k] - b[k]);
                }
                assert_eq!(d.get(i, j), s);
            }
        }
    }

    #[test]
    fn deltacon_matrix_matches_pairwise() {
        let graphs = vec![
            graph(4, &[(0, 1)]),
            graph(4, &[(0, 1), (2, 3)]),
            graph(4, &[]),
            graph(4, &[(0, 3), (1, 2), (1, 3)]),
        ];
        let items: Vec<Observation> = graphs.into_iter().map(Observation::Graph).collect();
        let seq = Sequence::new(items.clone()).unwrap();
        let d = build_distance_matrix(&Metric::DeltaCon, &seq).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let p = pairwise(&Metric::DeltaCon, &items[i], &items[j]).unwrap();
                assert!((d.get(i, j) - p).abs() < 1e-15);
            }
        }
    }
}
