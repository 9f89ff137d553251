// SPDX-License-Identifier: MIT OR Apache-2.0

//! Scan statistics over candidate split points.
//!
//! For a split after observation `t` the pairs of the sequence fall into three
//! groups: cross pairs `A(t)` (unordered, `t(n-t)` of them), and within-phase
//! pairs `B1(t)`, `B2(t)` (ordered, `t(t-1)` and `(n-t)(n-t-1)` of them). The
//! three sums are maintained incrementally, giving every statistic over the
//! whole window in `O(n^2)`.

use crate::data::{DistanceMatrix, ScanWindow, WindowBounds};
use crate::error::{CpdError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// `s_hat` at or below this value makes the dispersion-scaled statistics undefined.
pub const DISPERSION_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistic {
    /// Location statistic, `max t(n-t)/n * T1(t)`.
    #[serde(rename = "S1")]
    S1,
    /// Location statistic built on the squared mean-embedding gap.
    #[serde(rename = "S1t")]
    S1Tilde,
    /// Scale statistic, `max sqrt(t(n-t)/n) T2(t) / (2 s_hat)`.
    #[serde(rename = "S2")]
    S2,
    /// Bias-corrected scale statistic.
    #[serde(rename = "S2t")]
    S2Tilde,
    /// Combined statistic `max t(n-t)/n (4 T1^2 + T2^2) / (4 s_hat^2)`.
    #[serde(rename = "S3")]
    S3,
}

impl Statistic {
    pub const ALL: [Statistic; 5] = [
        Statistic::S1,
        Statistic::S1Tilde,
        Statistic::S2,
        Statistic::S2Tilde,
        Statistic::S3,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Statistic::S1 => "S1",
            Statistic::S1Tilde => "S1t",
            Statistic::S2 => "S2",
            Statistic::S2Tilde => "S2t",
            Statistic::S3 => "S3",
        }
    }

    /// Whether the statistic is scaled by `s_hat`.
    pub fn needs_dispersion(&self) -> bool {
        matches!(self, Statistic::S2 | Statistic::S2Tilde | Statistic::S3)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = CpdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S1" | "s1" => Ok(Statistic::S1),
            "S1t" | "s1t" | "S1~" => Ok(Statistic::S1Tilde),
            "S2" | "s2" => Ok(Statistic::S2),
            "S2t" | "s2t" | "S2~" => Ok(Statistic::S2Tilde),
            "S3" | "s3" => Ok(Statistic::S3),
            other => Err(CpdError::InvalidConfig(format!("unknown statistic {other:?}"))),
        }
    }
}

/// Distance-only moment estimators of the feature-map norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub m2: f64,
    pub m4: f64,
    pub m6: f64,
    pub s_hat: f64,
}

impl Moments {
    /// Third central moment of `||eps||^2`, `m6 - 3 m2 m4 + 2 m2^3`.
    pub fn central_third(&self) -> f64 {
        self.m6 - 3.0 * self.m2 * self.m4 + 2.0 * self.m2.powi(3)
    }

    pub fn is_degenerate(&self) -> bool {
        self.s_hat <= DISPERSION_EPS
    }
}

/// `m2 = dbar/2`, `m4 = mean((2 dbar_i - dbar)^2)/4`, `m6 = mean((2 dbar_i - dbar)^3)/8`,
/// `s_hat^2 = mean(dbar_i^2) - dbar^2` clamped at zero.
pub fn moments(d: &DistanceMatrix) -> Moments {
    let n = d.n();
    if n == 0 {
        return Moments {
            m2: 0.0,
            m4: 0.0,
            m6: 0.0,
            s_hat: 0.0,
        };
    }
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| d.row(i).iter().sum::<f64>() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    let mut m4 = 0.0;
    let mut m6 = 0.0;
    let mut sq = 0.0;
    for &r in &row_means {
        let c = 2.0 * r - grand;
        m4 += c * c;
        m6 += c * c * c;
        sq += r * r;
    }
    let s2 = (sq / nf - grand * grand).max(0.0);
    Moments {
        m2: grand / 2.0,
        m4: m4 / (4.0 * nf),
        m6: m6 / (8.0 * nf),
        s_hat: s2.sqrt(),
    }
}

/// Maximum of a score array over the window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatValue {
    pub statistic: Statistic,
    pub value: f64,
    /// Smallest maximizing split, in the coordinates of the full sequence.
    pub argmax: usize,
}

/// Within/between distance sums and moments for one (sub)sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanProfile {
    offset: usize,
    bounds: WindowBounds,
    d_total: f64,
    d_a: Vec<f64>,
    d_b1: Vec<f64>,
    d_b2: Vec<f64>,
    moments: Moments,
}

impl ScanProfile {
    /// Builds the profile of a whole matrix over explicit local bounds.
    pub fn build(d: &DistanceMatrix, bounds: WindowBounds) -> Self {
        Self::build_with(d, bounds, 0, moments(d))
    }

    pub(crate) fn build_with(
        d: &DistanceMatrix,
        bounds: WindowBounds,
        offset: usize,
        moments: Moments,
    ) -> Self {
        let n = d.n();
        debug_assert_eq!(n, bounds.n);
        // prefix[t]: ordered within-sum of observations 0..t.
        let mut prefix = vec![0.0; n + 1];
        for t in 1..=n {
            let row = d.row(t - 1);
            prefix[t] = prefix[t - 1] + 2.0 * row[..t - 1].iter().sum::<f64>();
        }
        // suffix[t]: ordered within-sum of observations t..n.
        let mut suffix = vec![0.0; n + 1];
        for t in (0..n).rev() {
            let row = d.row(t);
            suffix[t] = suffix[t + 1] + 2.0 * row[t + 1..].iter().sum::<f64>();
        }
        let d_total = prefix[n];
        let range = bounds.n0..=bounds.n1;
        let d_b1: Vec<f64> = range.clone().map(|t| prefix[t]).collect();
        let d_b2: Vec<f64> = range.map(|t| suffix[t]).collect();
        let d_a = d_b1
            .iter()
            .zip(&d_b2)
            .map(|(b1, b2)| 0.5 * (d_total - b1 - b2))
            .collect();
        Self {
            offset,
            bounds,
            d_total,
            d_a,
            d_b1,
            d_b2,
            moments,
        }
    }

    /// Local sequence length.
    pub fn n(&self) -> usize {
        self.bounds.n
    }

    /// Index of the first observation of the scanned interval.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn bounds(&self) -> WindowBounds {
        self.bounds
    }

    pub fn moments(&self) -> &Moments {
        &self.moments
    }

    /// Sum over all ordered off-diagonal pairs.
    pub fn d_total(&self) -> f64 {
        self.d_total
    }

    /// Local split points `n0..=n1`.
    pub fn splits(&self) -> std::ops::RangeInclusive<usize> {
        self.bounds.n0..=self.bounds.n1
    }

    fn idx(&self, t: usize) -> usize {
        assert!(self.bounds.contains(t), "split {t} outside window {:?}", self.bounds);
        t - self.bounds.n0
    }

    pub fn d_a(&self, t: usize) -> f64 {
        self.d_a[self.idx(t)]
    }

    pub fn d_b1(&self, t: usize) -> f64 {
        self.d_b1[self.idx(t)]
    }

    pub fn d_b2(&self, t: usize) -> f64 {
        self.d_b2[self.idx(t)]
    }

    fn parts(&self, t: usize) -> (f64, f64, f64, f64, f64) {
        let i = self.idx(t);
        (
            t as f64,
            (self.n() - t) as f64,
            self.d_a[i],
            self.d_b1[i],
            self.d_b2[i],
        )
    }

    /// `dbar_A - dbar_B1/2 - dbar_B2/2` with the pair-count divisors.
    pub fn t1(&self, t: usize) -> f64 {
        let (l, r, a, b1, b2) = self.parts(t);
        a / (l * r) - b1 / (2.0 * l * (l - 1.0)) - b2 / (2.0 * r * (r - 1.0))
    }

    /// Squared mean-embedding gap; never negative for kernels of negative type.
    pub fn t1_tilde(&self, t: usize) -> f64 {
        let (l, r, a, b1, b2) = self.parts(t);
        a / (l * r) - b1 / (2.0 * l * l) - b2 / (2.0 * r * r)
    }

    /// `|dbar_B1 - dbar_B2|`.
    pub fn t2(&self, t: usize) -> f64 {
        let (l, r, _, b1, b2) = self.parts(t);
        (b1 / (l * (l - 1.0)) - b2 / (r * (r - 1.0))).abs()
    }

    /// Within-phase averages over all `t^2` and `(n-t)^2` ordered pairs, minus
    /// their null bias `2 m2 (2t/n - 1) / (n rho (1 - rho))` at `rho = t/n`.
    pub fn t2_tilde(&self, t: usize) -> f64 {
        let (l, r, _, b1, b2) = self.parts(t);
        let n = self.n() as f64;
        let rho = l / n;
        let drift = 2.0 * self.moments.m2 * (2.0 * rho - 1.0) / (n * rho * (1.0 - rho));
        (b1 / (l * l) - b2 / (r * r) - drift).abs()
    }

    fn check_dispersion(&self, which: Statistic) -> Result<()> {
        if which.needs_dispersion() && self.moments.is_degenerate() {
            return Err(CpdError::DegenerateDispersion {
                s_hat: self.moments.s_hat,
            });
        }
        Ok(())
    }

    /// Scaled score of `which` at local split `t`.
    pub fn score(&self, which: Statistic, t: usize) -> Result<f64> {
        self.check_dispersion(which)?;
        Ok(self.score_unchecked(which, t))
    }

    fn score_unchecked(&self, which: Statistic, t: usize) -> f64 {
        let n = self.n() as f64;
        let tf = t as f64;
        let weight = tf * (n - tf) / n;
        let s = self.moments.s_hat;
        match which {
            Statistic::S1 => weight * self.t1(t),
            Statistic::S1Tilde => weight * self.t1_tilde(t),
            Statistic::S2 => weight.sqrt() * self.t2(t) / (2.0 * s),
            Statistic::S2Tilde => weight.sqrt() * self.t2_tilde(t) / (2.0 * s),
            Statistic::S3 => {
                let t1 = self.t1(t);
                let t2 = self.t2(t);
                weight * (4.0 * t1 * t1 + t2 * t2) / (4.0 * s * s)
            }
        }
    }

    /// Score array over `n0..=n1`.
    pub fn scores(&self, which: Statistic) -> Result<Vec<f64>> {
        self.check_dispersion(which)?;
        Ok(self.splits().map(|t| self.score_unchecked(which, t)).collect())
    }

    /// Maximum score and its smallest maximizer.
    pub fn statistic(&self, which: Statistic) -> Result<StatValue> {
        let scores = self.scores(which)?;
        let (best, value) = argmax_first(&scores);
        Ok(StatValue {
            statistic: which,
            value,
            argmax: self.offset + self.bounds.n0 + best,
        })
    }
}

/// Index and value of the first maximum; NaN scores never win.
pub(crate) fn argmax_first(values: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut value = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > value {
            value = v;
            best = i;
        }
    }
    (best, value)
}

/// Profile of the full sequence over the window derived from `window`.
pub fn scan_sums(d: &DistanceMatrix, window: &ScanWindow) -> Result<ScanProfile> {
    let bounds = window.bounds(d.n())?;
    Ok(ScanProfile::build(d, bounds))
}

/// Profile of observations `l..r` (0-based half-open), with local window
/// `[ceil((r-l) rho0), ceil((r-l) rho1)]` clamped to keep two observations
/// on either side.
pub fn scan_subinterval(
    d: &DistanceMatrix,
    l: usize,
    r: usize,
    window: &ScanWindow,
) -> Result<ScanProfile> {
    if r > d.n() || l > r || r - l < 4 {
        return Err(CpdError::SubintervalTooShort { l, r });
    }
    let sub = d.submatrix(l, r);
    let bounds = window.bounds(r - l)?;
    let m = moments(&sub);
    Ok(ScanProfile::build_with(&sub, bounds, l, m))
}

/// Convenience wrapper: the statistic `which` of the full sequence.
pub fn statistic_s(d: &DistanceMatrix, window: &ScanWindow, which: Statistic) -> Result<StatValue> {
    scan_sums(d, window)?.statistic(which)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn line(points: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_upper_fn(points.len(), |i, j| (points[i] - points[j]).powi(2))
    }

    fn random_matrix(n: usize, seed: u64) -> DistanceMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DistanceMatrix::from_upper_fn(n, |_, _| rng.random::<f64>() * 5.0)
    }

    #[test]
    fn unit_matrix_sums() {
        let d = DistanceMatrix::from_upper_fn(4, |_, _| 1.0);
        let p = ScanProfile::build(&d, WindowBounds::explicit(4, 2, 2).unwrap());
        assert_eq!(p.d_b1(2), 2.0);
        assert_eq!(p.d_b2(2), 2.0);
        assert_eq!(p.d_a(2), 4.0);
    }

    #[test]
    fn sums_match_brute_force() {
        let n = 12;
        let d = random_matrix(n, 11);
        let p = ScanProfile::build(&d, WindowBounds::explicit(n, 2, n - 2).unwrap());
        for t in 2..=n - 2 {
            let mut a = 0.0;
            let mut b1 = 0.0;
            let mut b2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let v = d.get(i, j);
                    match (i < t, j < t) {
                        (true, true) => b1 += v,
                        (false, false) => b2 += v,
                        (true, false) => a += v,
                        _ => {}
                    }
                }
            }
            assert!((p.d_a(t) - a).abs() <= 1e-12 * a.max(1.0));
            assert!((p.d_b1(t) - b1).abs() <= 1e-12 * b1.max(1.0));
            assert!((p.d_b2(t) - b2).abs() <= 1e-12 * b2.max(1.0));
            assert!((p.d_b1(t) + p.d_b2(t) + 2.0 * p.d_a(t) - p.d_total()).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_sequence() {
        let d = DistanceMatrix::from_upper_fn(10, |_, _| 0.0);
        let p = scan_sums(&d, &ScanWindow::default()).unwrap();
        for t in p.splits() {
            assert_eq!(p.t1(t), 0.0);
            assert_eq!(p.t1_tilde(t), 0.0);
        }
        let s1 = p.statistic(Statistic::S1).unwrap();
        assert_eq!(s1.value, 0.0);
        assert_eq!(s1.argmax, p.bounds().n0);
        assert_eq!(
            *p.moments(),
            Moments {
                m2: 0.0,
                m4: 0.0,
                m6: 0.0,
                s_hat: 0.0
            }
        );
        for which in [Statistic::S2, Statistic::S2Tilde, Statistic::S3] {
            assert!(matches!(
                p.statistic(which),
                Err(CpdError::DegenerateDispersion { .. })
            ));
        }
    }

    #[test]
    fn two_clusters_recover_gap() {
        let mut pts = vec![1.0; 7];
        pts.extend(vec![4.0; 13]);
        let d = line(&pts);
        let p = ScanProfile::build(&d, WindowBounds::explicit(20, 2, 18).unwrap());
        assert!((p.t1(7) - 9.0).abs() < 1e-12);
        assert!((p.t1_tilde(7) - 9.0).abs() < 1e-12);
        assert_eq!(p.statistic(Statistic::S1).unwrap().argmax, 7);
    }

    #[test]
    fn moments_two_points() {
        let d = DistanceMatrix::from_rows(vec![vec![0.0, 4.0], vec![4.0, 0.0]]).unwrap();
        let m = moments(&d);
        assert_eq!(m.m2, 1.0);
        assert_eq!(m.m4, 1.0);
        assert_eq!(m.m6, 1.0);
        assert_eq!(m.s_hat, 0.0);
    }

    #[test]
    fn t2_is_twice_variance_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<f64> = (0..30).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let d = line(&pts);
        let p = ScanProfile::build(&d, WindowBounds::explicit(30, 2, 28).unwrap());
        let var = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
        };
        for t in p.splits() {
            let expected = 2.0 * (var(&pts[..t]) - var(&pts[t..])).abs();
            assert!((p.t2(t) - expected).abs() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn t2_tilde_correction_is_small() {
        let d = random_matrix(40, 3);
        let p = ScanProfile::build(&d, WindowBounds::explicit(40, 4, 36).unwrap());
        let m2 = p.moments().m2;
        for t in p.splits() {
            let rho = t as f64 / 40.0;
            let bound = 2.0 * m2 / (40.0 * rho * (1.0 - rho)).sqrt();
            assert!((p.t2(t) - p.t2_tilde(t)).abs() <= bound);
        }
    }

    #[test]
    fn symmetric_split_has_no_drift() {
        // Symmetric data around the midpoint: B1 and B2 averages coincide at n/2.
        let pts = [0.0, 1.0, 3.0, 3.0, 1.0, 0.0];
        let d = line(&pts);
        let p = ScanProfile::build(&d, WindowBounds::explicit(6, 2, 4).unwrap());
        assert!(p.t2(3).abs() < 1e-14);
        assert!(p.t2_tilde(3).abs() < 1e-14);
    }

    #[test]
    fn mean_shift_localized() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<f64> = (0..100)
            .map(|i| rng.sample::<f64, _>(StandardNormal) + if i >= 33 { 10.0 } else { 0.0 })
            .collect();
        let s1 = statistic_s(&line(&pts), &ScanWindow::default(), Statistic::S1).unwrap();
        assert!((s1.argmax as i64 - 33).abs() <= 2, "argmax {}", s1.argmax);
    }

    #[test]
    fn subinterval_full_range_matches() {
        let d = random_matrix(20, 8);
        let w = ScanWindow::default();
        let full = scan_sums(&d, &w).unwrap();
        let sub = scan_subinterval(&d, 0, 20, &w).unwrap();
        assert_eq!(full, sub);
    }

    #[test]
    fn subinterval_matches_fresh_matrix() {
        let d = random_matrix(30, 12);
        let w = ScanWindow::new(0.2, 0.8).unwrap();
        let sub = scan_subinterval(&d, 7, 25, &w).unwrap();
        let fresh = scan_sums(&d.submatrix(7, 25), &w).unwrap();
        assert_eq!(sub.bounds(), fresh.bounds());
        assert_eq!(sub.moments(), fresh.moments());
        for which in Statistic::ALL {
            let a = sub.statistic(which).unwrap();
            let b = fresh.statistic(which).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.argmax, b.argmax + 7);
        }
    }

    #[test]
    fn subinterval_too_short() {
        let d = random_matrix(10, 1);
        assert!(matches!(
            scan_subinterval(&d, 2, 5, &ScanWindow::default()),
            Err(CpdError::SubintervalTooShort { l: 2, r: 5 })
        ));
        assert!(scan_subinterval(&d, 2, 6, &ScanWindow::default()).is_ok());
    }

    #[test]
    fn statistic_names_round_trip() {
        for s in Statistic::ALL {
            assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
        }
        assert!("S4".parse::<Statistic>().is_err());
    }
}
