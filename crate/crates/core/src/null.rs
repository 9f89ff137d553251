// SPDX-License-Identifier: MIT OR Apache-2.0

//! Null distributions and p-values.
//!
//! Three engines are provided: Monte-Carlo draws from the Brownian-bridge
//! limits of the scan statistics, an analytic skewness-corrected tail for the
//! bias-corrected scale statistic, and permutation of the observation order.

use crate::data::{DistanceMatrix, WindowBounds};
use crate::error::{CpdError, Result};
use crate::kernel::EigenSpectrum;
use crate::rng::stream_rng;
use crate::scan::{moments, Moments, ScanProfile, Statistic};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_MC_REPS: usize = 2000;
pub const DEFAULT_PERMUTATIONS: usize = 1000;
pub const MIN_REPS: usize = 100;
/// Simpson panels for the corrected tail integral.
pub const QUADRATURE_PANELS: usize = 512;
/// Relative tolerance used when counting null draws tied with the observed value.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    /// Monte-Carlo draws from the limiting Gaussian functional.
    Asymptotic,
    /// Analytic tail with the skewness correction.
    Corrected,
    Permutation,
}

impl PValueMethod {
    pub fn name(&self) -> &'static str {
        match self {
            PValueMethod::Asymptotic => "asymptotic",
            PValueMethod::Corrected => "corrected",
            PValueMethod::Permutation => "permutation",
        }
    }

    pub fn default_reps(&self) -> usize {
        match self {
            PValueMethod::Asymptotic => DEFAULT_MC_REPS,
            PValueMethod::Corrected => 0,
            PValueMethod::Permutation => DEFAULT_PERMUTATIONS,
        }
    }
}

impl fmt::Display for PValueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PValueMethod {
    type Err = CpdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(PValueMethod::Asymptotic),
            "corrected" => Ok(PValueMethod::Corrected),
            "permutation" => Ok(PValueMethod::Permutation),
            other => Err(CpdError::InvalidConfig(format!("unknown p-value method {other:?}"))),
        }
    }
}

/// Which print of the corrected tail formula to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionVariant {
    /// `nu` evaluated at `sqrt(x / (u(1-u) n))`.
    MainText,
    /// `nu` evaluated at `x / sqrt(u(1-u) n)`, two-sided.
    #[default]
    AppendixDerived,
}

impl CorrectionVariant {
    pub fn name(&self) -> &'static str {
        match self {
            CorrectionVariant::MainText => "main",
            CorrectionVariant::AppendixDerived => "appendix",
        }
    }
}

impl FromStr for CorrectionVariant {
    type Err = CpdError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" | "main_text" => Ok(CorrectionVariant::MainText),
            "appendix" | "appendix_derived" => Ok(CorrectionVariant::AppendixDerived),
            other => Err(CpdError::InvalidConfig(format!(
                "unknown correction variant {other:?}"
            ))),
        }
    }
}

/// Sampled null distribution of a scan maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullModel {
    pub method: PValueMethod,
    pub samples: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub bounds: WindowBounds,
}

impl NullModel {
    /// Null of the squared statistic, used for `S3`.
    pub fn squared(mut self) -> Self {
        for v in self.samples.iter_mut() {
            *v *= *v;
        }
        self
    }

    /// Empirical `q`-quantile (lower interpolation-free order statistic).
    pub fn quantile(&self, q: f64) -> f64 {
        let mut s = self.samples.clone();
        s.sort_by(f64::total_cmp);
        let idx = ((q * s.len() as f64).ceil() as usize).clamp(1, s.len()) - 1;
        s[idx]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub method: PValueMethod,
    /// Number of null draws; zero for the analytic tail.
    pub reps: usize,
    pub mc_stderr: Option<f64>,
}

impl PValue {
    pub fn one(method: PValueMethod) -> Self {
        Self {
            value: 1.0,
            method,
            reps: 0,
            mc_stderr: None,
        }
    }
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPS {
        return Err(CpdError::InvalidConfig(format!(
            "at least {MIN_REPS} replicates required, got {reps}"
        )));
    }
    Ok(())
}

/// Brownian bridge on the grid `k/n`, returned at `t = n0..=n1`.
fn bridge<R: Rng>(rng: &mut R, bounds: &WindowBounds, out: &mut [f64]) {
    let n = bounds.n;
    let step = (1.0 / n as f64).sqrt();
    let mut w = 0.0;
    for t in 1..=n {
        w += step * rng.sample::<f64, _>(StandardNormal);
        if bounds.contains(t) {
            out[t - bounds.n0] = w;
        }
    }
    for (i, v) in out.iter_mut().enumerate() {
        let rho = (bounds.n0 + i) as f64 / n as f64;
        *v -= rho * w;
    }
}

fn rho_terms(bounds: &WindowBounds) -> Vec<f64> {
    (bounds.n0..=bounds.n1)
        .map(|t| {
            let rho = t as f64 / bounds.n as f64;
            rho * (1.0 - rho)
        })
        .collect()
}

fn simulate_s1(
    spectrum: &EigenSpectrum,
    bounds: WindowBounds,
    reps: usize,
    seed: u64,
    centered: bool,
) -> Result<NullModel> {
    check_reps(reps)?;
    let lambdas = spectrum.kept_values();
    if lambdas.is_empty() {
        return Err(CpdError::EmptySpectrum);
    }
    let var = rho_terms(&bounds);
    let shift = if centered { 1.0 } else { 0.0 };
    let samples = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep as u64);
            let mut acc = vec![0.0; bounds.len()];
            let mut b = vec![0.0; bounds.len()];
            for &lambda in lambdas {
                bridge(&mut rng, &bounds, &mut b);
                for ((a, &bv), &v) in acc.iter_mut().zip(&b).zip(&var) {
                    *a += lambda * (bv * bv - shift * v);
                }
            }
            acc.iter()
                .zip(&var)
                .map(|(a, v)| a / v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(NullModel {
        method: PValueMethod::Asymptotic,
        samples,
        reps,
        seed,
        bounds,
    })
}

/// Draws of `max_t sum_l lambda_l (B_l(rho)^2 - rho(1-rho)) / (rho(1-rho))`, `rho = t/n`.
pub fn simulate_null_s1(
    spectrum: &EigenSpectrum,
    bounds: WindowBounds,
    reps: usize,
    seed: u64,
) -> Result<NullModel> {
    simulate_s1(spectrum, bounds, reps, seed, true)
}

/// Draws of `max_t sum_l lambda_l B_l(rho)^2 / (rho(1-rho))`, the limit of `S1t`.
pub fn simulate_null_s1_tilde(
    spectrum: &EigenSpectrum,
    bounds: WindowBounds,
    reps: usize,
    seed: u64,
) -> Result<NullModel> {
    simulate_s1(spectrum, bounds, reps, seed, false)
}

/// Draws of `max_t |B(rho)| / sqrt(rho(1-rho))`.
pub fn simulate_null_s2(bounds: WindowBounds, reps: usize, seed: u64) -> Result<NullModel> {
    check_reps(reps)?;
    let scale: Vec<f64> = rho_terms(&bounds).iter().map(|v| v.sqrt().recip()).collect();
    let samples = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep as u64);
            let mut b = vec![0.0; bounds.len()];
            bridge(&mut rng, &bounds, &mut b);
            b.iter()
                .zip(&scale)
                .map(|(v, s)| v.abs() * s)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(NullModel {
        method: PValueMethod::Asymptotic,
        samples,
        reps,
        seed,
        bounds,
    })
}

fn count_at_least(samples: &[f64], observed: f64) -> usize {
    let cut = observed - TIE_TOL * observed.abs().max(1.0);
    samples.iter().filter(|&&s| s >= cut).count()
}

/// Add-one tail probability `(1 + #{sample >= observed}) / (reps + 1)`.
pub fn pvalue_from_null(model: &NullModel, observed: f64) -> PValue {
    let reps = model.samples.len();
    let p = (1 + count_at_least(&model.samples, observed)) as f64 / (reps + 1) as f64;
    PValue {
        value: p,
        method: model.method,
        reps,
        mc_stderr: Some((p * (1.0 - p) / reps as f64).sqrt()),
    }
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Overshoot correction `nu(z) = (2/z)(Phi(z/2) - 1/2) / ((z/2) Phi(z/2) + phi(z/2))`.
pub fn nu(z: f64) -> f64 {
    if z < 1e-8 {
        return 1.0;
    }
    let h = 0.5 * z;
    let cdf = std_normal_cdf(h);
    (2.0 / z) * (cdf - 0.5) / (h * cdf + std_normal_pdf(h))
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Skewness-corrected tail probability of the bias-corrected scale statistic at `x`.
pub fn pvalue_s2_corrected(
    x: f64,
    moments: &Moments,
    bounds: WindowBounds,
    variant: CorrectionVariant,
) -> Result<PValue> {
    if moments.is_degenerate() {
        return Err(CpdError::DegenerateDispersion {
            s_hat: moments.s_hat,
        });
    }
    let mut p = PValue::one(PValueMethod::Corrected);
    if !(x > 0.0) {
        return Ok(p);
    }
    let n = bounds.n as f64;
    let skew = moments.central_third() / moments.s_hat.powi(3);
    let edgeworth = x * (x * x - 3.0) / (6.0 * n.sqrt());
    let integrand = |u: f64| {
        let q = u * (1.0 - u);
        let v = (1.0 - 2.0 * u) / q.sqrt() * skew;
        let arg = match variant {
            CorrectionVariant::MainText => (x / (q * n)).sqrt(),
            CorrectionVariant::AppendixDerived => x / (q * n).sqrt(),
        };
        (1.0 + v * edgeworth) / q * nu(arg)
    };
    let a = bounds.n0 as f64 / n;
    let b = bounds.n1 as f64 / n;
    let tail = x * std_normal_pdf(x) * simpson(integrand, a, b, QUADRATURE_PANELS);
    p.value = if tail.is_finite() {
        tail.clamp(f64::MIN_POSITIVE, 1.0)
    } else {
        1.0
    };
    Ok(p)
}

/// Uniform permutation of `0..n` by Fisher-Yates.
pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Statistic `which` recomputed under `reps` random relabelings of `d`.
pub fn permutation_null(
    d: &DistanceMatrix,
    which: Statistic,
    bounds: WindowBounds,
    reps: usize,
    seed: u64,
) -> Result<NullModel> {
    check_reps(reps)?;
    let m = moments(d);
    if which.needs_dispersion() && m.is_degenerate() {
        return Err(CpdError::DegenerateDispersion { s_hat: m.s_hat });
    }
    let samples = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, rep as u64);
            let perm = random_permutation(&mut rng, d.n());
            let profile = ScanProfile::build_with(&d.permuted(&perm), bounds, 0, m);
            profile.statistic(which).map(|s| s.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NullModel {
        method: PValueMethod::Permutation,
        samples,
        reps,
        seed,
        bounds,
    })
}

/// Permutation p-value `(1 + #{perm >= observed}) / (J + 1)`.
pub fn permutation_pvalue(
    d: &DistanceMatrix,
    which: Statistic,
    bounds: WindowBounds,
    reps: usize,
    seed: u64,
) -> Result<PValue> {
    let observed = ScanProfile::build(d, bounds).statistic(which)?.value;
    let null = permutation_null(d, which, bounds, reps, seed)?;
    Ok(pvalue_from_null(&null, observed))
}
