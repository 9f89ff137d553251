// SPDX-License-Identifier: MIT OR Apache-2.0

//! Binary segmentation for multiple change points, and the Rand index.
//!
//! Intervals are half-open in 0-based observation indices: node `(l, r)`
//! covers observations `l..r`, and a split `k` separates `l..k` from `k..r`.
//! With 1-based labels this is the interval `(l, r]` split into `(l, k]` and
//! `(k, r]`.

use crate::data::{DistanceMatrix, ScanWindow};
use crate::detect::{detect, EngineConfig};
use crate::error::{CpdError, Result};
use crate::rng::derive_seed;
use crate::scan::Statistic;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub alpha: f64,
    pub n_min: usize,
    pub statistic: Statistic,
    pub engine: EngineConfig,
    pub window: ScanWindow,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            n_min: 20,
            statistic: Statistic::S1,
            engine: EngineConfig::default(),
            window: ScanWindow::default(),
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CpdError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.n_min < 2 {
            return Err(CpdError::InvalidConfig(format!(
                "n_min must be at least 2, got {}",
                self.n_min
            )));
        }
        self.window.validate()?;
        self.engine.check(self.statistic)
    }

    /// Shortest interval that is scanned at all.
    pub fn min_interval(&self) -> usize {
        (2 * self.n_min).max(5)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentNode {
    pub l: usize,
    pub r: usize,
    /// Observed statistic; `None` when it was undefined on this interval.
    pub stat: Option<f64>,
    pub p: f64,
    pub k: Option<usize>,
    pub accepted: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SegmentNode>,
}

impl SegmentNode {
    fn collect(&self, out: &mut Vec<usize>) {
        if self.accepted {
            if let Some(k) = self.k {
                out.push(k);
            }
        }
        for c in &self.children {
            c.collect(out);
        }
    }

    fn pruned(&self, alpha: f64) -> SegmentNode {
        let mut node = self.clone();
        if !(node.accepted && node.p <= alpha) {
            node.accepted = false;
            node.children.clear();
        } else {
            node.children = self.children.iter().map(|c| c.pruned(alpha)).collect();
        }
        node
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationTree {
    pub n: usize,
    pub root: Option<SegmentNode>,
    pub change_points: Vec<usize>,
}

impl SegmentationTree {
    fn from_root(n: usize, root: Option<SegmentNode>) -> Self {
        let mut change_points = Vec::new();
        if let Some(r) = &root {
            r.collect(&mut change_points);
        }
        change_points.sort_unstable();
        Self {
            n,
            root,
            change_points,
        }
    }

    /// The tree that a smaller significance level would have produced, using
    /// the cached node p-values.
    pub fn prune(&self, alpha: f64) -> SegmentationTree {
        Self::from_root(self.n, self.root.as_ref().map(|r| r.pruned(alpha)))
    }

    /// Every node in depth-first order.
    pub fn nodes(&self) -> Vec<&SegmentNode> {
        fn walk<'a>(node: &'a SegmentNode, out: &mut Vec<&'a SegmentNode>) {
            out.push(node);
            for c in &node.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        if let Some(r) = &self.root {
            walk(r, &mut out);
        }
        out
    }
}

fn segment_node(
    d: &DistanceMatrix,
    l: usize,
    r: usize,
    cfg: &SegmentationConfig,
) -> Result<Option<SegmentNode>> {
    if r - l < cfg.min_interval() {
        return Ok(None);
    }
    let sub = d.submatrix(l, r);
    let bounds = cfg.window.bounds(r - l)?;
    let engine = EngineConfig {
        seed: derive_seed(cfg.engine.seed, l as u64, r as u64),
        ..cfg.engine
    };
    let detection = match detect(&sub, cfg.statistic, bounds, &engine) {
        Ok(det) => det,
        Err(CpdError::DegenerateDispersion { s_hat }) => {
            log::debug!("interval ({l}, {r}] has degenerate dispersion {s_hat}");
            return Ok(Some(SegmentNode {
                l,
                r,
                stat: None,
                p: 1.0,
                k: None,
                accepted: false,
                degenerate: true,
                children: Vec::new(),
            }));
        }
        Err(e) => return Err(e),
    };
    let k = l + detection.tau_hat();
    let p = detection.p_value.value;
    let accepted = p <= cfg.alpha && k - l >= cfg.n_min && r - k >= cfg.n_min;
    let children = if accepted {
        let (left, right) = rayon::join(
            || segment_node(d, l, k, cfg),
            || segment_node(d, k, r, cfg),
        );
        left?.into_iter().chain(right?).collect()
    } else {
        Vec::new()
    };
    Ok(Some(SegmentNode {
        l,
        r,
        stat: Some(detection.stat.value),
        p,
        k: Some(k),
        accepted,
        degenerate: false,
        children,
    }))
}

/// Recursive binary segmentation of the whole sequence.
pub fn binary_segment(d: &DistanceMatrix, cfg: &SegmentationConfig) -> Result<SegmentationTree> {
    cfg.validate()?;
    let root = segment_node(d, 0, d.n(), cfg)?;
    Ok(SegmentationTree::from_root(d.n(), root))
}

/// Labels for segments `(0, cp1], (cp1, cp2], ..., (cpK, n]`.
pub fn changepoints_to_partition(cps: &[usize], n: usize) -> Result<Vec<usize>> {
    for (i, &cp) in cps.iter().enumerate() {
        if cp == 0 || cp >= n {
            return Err(CpdError::OutOfRange { cp, n });
        }
        if i > 0 && cps[i - 1] >= cp {
            return Err(CpdError::NotSorted);
        }
    }
    let mut labels = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        while seg < cps.len() && i >= cps[seg] {
            seg += 1;
        }
        labels.push(seg);
    }
    Ok(labels)
}

/// Fraction of unordered pairs on which two labelings agree.
pub fn rand_index(u: &[usize], v: &[usize]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(CpdError::PartitionInvalid(format!(
            "partitions cover {} and {} observations",
            u.len(),
            v.len()
        )));
    }
    let n = u.len();
    if n < 2 {
        return Err(CpdError::PartitionInvalid(format!(
            "need at least two observations, got {n}"
        )));
    }
    let mut agree = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if (u[i] == u[j]) == (v[i] == v[j]) {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (n * (n - 1) / 2) as f64)
}
