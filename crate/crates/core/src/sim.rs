// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic sequences and replicated experiments.
//!
//! A [`ScenarioSpec`] fixes a generator with one parameter set per phase, the
//! true change points, and the detection pipeline. [`run_experiment`]
//! replicates it and aggregates rejection rate, localization error and Rand
//! index with Monte-Carlo standard errors.

use crate::data::{Graph, Observation, ScanWindow, Sequence};
use crate::detect::{detect, EngineConfig};
use crate::distance::{build_distance_matrix, Metric};
use crate::error::{CpdError, Result};
use crate::null::{CorrectionVariant, PValueMethod};
use crate::rng::{derive_seed, stream_rng};
use crate::scan::Statistic;
use crate::segment::{binary_segment, changepoints_to_partition, rand_index, SegmentationConfig};
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

/// Describes how every random quantity of a run is seeded.
pub const SEED_SCHEME: &str = "replicate k of a scenario with seed s draws its data from ChaCha8 \
    stream 0 keyed by derive_seed(s, 1, k) and runs its p-value engine with seed \
    derive_seed(s, 2, k); engines read stream j for their j-th null draw; derive_seed is a \
    SplitMix64 cascade; results do not depend on the thread count";

const TAG_DATA: u64 = 1;
const TAG_ENGINE: u64 = 2;

/// Data generator with one parameter set per phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Phase `k` draws `mu[k] * 1 + sigma[k] * N(0, I_dim)`.
    Gaussian {
        dim: usize,
        mu: Vec<f64>,
        sigma: Vec<f64>,
    },
    /// Phase `k` draws `dim` independent `Poisson(lambda[k])` coordinates.
    Poisson { dim: usize, lambda: Vec<f64> },
    /// Erdos-Renyi graphs with edge probability `p0`, except among the first
    /// `community_size` nodes where phase `k` uses `p_in[k]`.
    ErdosRenyi {
        nodes: usize,
        p0: f64,
        p_in: Vec<f64>,
        community_size: usize,
    },
    /// `sin(x + shift[k]) + noise_sd * N(0, 1)` on `grid` points spanning `[0, 2 pi]`.
    Functional {
        grid: usize,
        noise_sd: f64,
        shift: Vec<f64>,
    },
}

impl Generator {
    pub fn gauss_mean_shift(dim: usize, mu1: f64) -> Self {
        Generator::Gaussian {
            dim,
            mu: vec![0.0, mu1],
            sigma: vec![1.0, 1.0],
        }
    }

    pub fn gauss_scale_shift(dim: usize, sigma1: f64) -> Self {
        Generator::Gaussian {
            dim,
            mu: vec![0.0, 0.0],
            sigma: vec![1.0, sigma1],
        }
    }

    pub fn gauss_both(dim: usize, mu1: f64, sigma1: f64) -> Self {
        Generator::Gaussian {
            dim,
            mu: vec![0.0, mu1],
            sigma: vec![1.0, sigma1],
        }
    }

    pub fn poisson_shift(lambda0: f64, lambda1: f64) -> Self {
        Generator::Poisson {
            dim: 1,
            lambda: vec![lambda0, lambda1],
        }
    }

    pub fn erdos_renyi(nodes: usize, p0: f64, p1: f64, community_size: usize) -> Self {
        Generator::ErdosRenyi {
            nodes,
            p0,
            p_in: vec![p0, p1],
            community_size,
        }
    }

    pub fn functional_phase(grid: usize, noise_sd: f64, mu: f64) -> Self {
        Generator::Functional {
            grid,
            noise_sd,
            shift: vec![0.0, mu],
        }
    }

    /// Null version: a single phase.
    pub fn gauss_null(dim: usize) -> Self {
        Generator::Gaussian {
            dim,
            mu: vec![0.0],
            sigma: vec![1.0],
        }
    }

    fn phases(&self) -> usize {
        match self {
            Generator::Gaussian { mu, .. } => mu.len(),
            Generator::Poisson { lambda, .. } => lambda.len(),
            Generator::ErdosRenyi { p_in, .. } => p_in.len(),
            Generator::Functional { shift, .. } => shift.len(),
        }
    }

    /// Metric used in the reference experiments for this kind of data.
    pub fn natural_metric(&self) -> Metric {
        match self {
            Generator::Gaussian { .. } | Generator::Poisson { .. } => Metric::SqEuclidean,
            Generator::ErdosRenyi { .. } => Metric::FrobeniusSq,
            Generator::Functional { .. } => Metric::L2Functional { interval: 2.0 * PI },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CpdError::InvalidConfig(msg));
        let positive = |xs: &[f64]| xs.iter().all(|&x| x > 0.0 && x.is_finite());
        let probs = |xs: &[f64]| xs.iter().all(|&x| (0.0..=1.0).contains(&x));
        match self {
            Generator::Gaussian { dim, mu, sigma } => {
                if *dim == 0 || mu.len() != sigma.len() || !positive(sigma) {
                    return bad(format!("invalid gaussian generator {self:?}"));
                }
            }
            Generator::Poisson { dim, lambda } => {
                if *dim == 0 || !positive(lambda) {
                    return bad(format!("invalid poisson generator {self:?}"));
                }
            }
            Generator::ErdosRenyi {
                nodes,
                p0,
                p_in,
                community_size,
            } => {
                if *nodes == 0 || community_size > nodes || !probs(p_in) || !probs(&[*p0]) {
                    return bad(format!("invalid erdos-renyi generator {self:?}"));
                }
            }
            Generator::Functional {
                grid, noise_sd, ..
            } => {
                if *grid < 2 || !(*noise_sd >= 0.0) {
                    return bad(format!("invalid functional generator {self:?}"));
                }
            }
        }
        if self.phases() == 0 {
            return bad("generator has no phases".into());
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R, phase: usize) -> Observation {
        match self {
            Generator::Gaussian { dim, mu, sigma } => Observation::Vector(
                (0..*dim)
                    .map(|_| mu[phase] + sigma[phase] * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            ),
            Generator::Poisson { dim, lambda } => Observation::Vector(
                (0..*dim).map(|_| poisson(rng, lambda[phase])).collect(),
            ),
            Generator::ErdosRenyi {
                nodes,
                p0,
                p_in,
                community_size,
            } => {
                let m = *nodes;
                let mut adj = vec![0u8; m * m];
                for i in 0..m {
                    for j in i + 1..m {
                        let p = if j < *community_size { p_in[phase] } else { *p0 };
                        if rng.random::<f64>() < p {
                            adj[i * m + j] = 1;
                            adj[j * m + i] = 1;
                        }
                    }
                }
                Observation::Graph(Graph::new(m, adj).expect("symmetric by construction"))
            }
            Generator::Functional {
                grid,
                noise_sd,
                shift,
            } => {
                let step = 2.0 * PI / (*grid - 1) as f64;
                Observation::Function(
                    (0..*grid)
                        .map(|g| {
                            (g as f64 * step + shift[phase]).sin()
                                + noise_sd * rng.sample::<f64, _>(StandardNormal)
                        })
                        .collect(),
                )
            }
        }
    }
}

/// Poisson draw by sequential inversion for small rates.
fn poisson<R: Rng>(rng: &mut R, lambda: f64) -> f64 {
    if lambda > 30.0 {
        return Poisson::new(lambda).expect("positive rate").sample(rng);
    }
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf && k < 1000 {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
    }
    k as f64
}

/// Single change point (detect, record rejection and localization) or
/// multiple change points (binary segmentation, record Rand index).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Single,
    Multiple,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub generator: Generator,
    pub n: usize,
    /// 0-based split indices: phase `k` covers observations `cp[k-1]..cp[k]`.
    pub change_points: Vec<usize>,
    pub metric: Metric,
    pub statistic: Statistic,
    pub engine: EngineConfig,
    #[serde(default)]
    pub window: ScanWindow,
    #[serde(default)]
    pub mode: Mode,
    pub alpha: f64,
    pub n_min: usize,
    pub reps: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Single-change scenario with the reference defaults (asymptotic engine,
    /// natural metric, alpha 0.05, 100 replicates).
    pub fn new(name: impl Into<String>, generator: Generator, n: usize, change_points: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            metric: generator.natural_metric(),
            generator,
            n,
            change_points,
            statistic: Statistic::S1,
            engine: EngineConfig::default(),
            window: ScanWindow::default(),
            mode: Mode::Single,
            alpha: 0.05,
            n_min: 20,
            reps: 100,
            seed: 0,
        }
    }

    pub fn with_statistic(mut self, statistic: Statistic, engine: EngineConfig) -> Self {
        self.statistic = statistic;
        self.engine = engine;
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn multiple(mut self) -> Self {
        self.mode = Mode::Multiple;
        self
    }

    /// Label of the p-value engine as written in reports.
    pub fn engine_label(&self) -> String {
        match self.engine.method {
            PValueMethod::Corrected => format!("corrected-{}", self.engine.variant.name()),
            m => m.name().to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if self.generator.phases() != self.change_points.len() + 1 {
            return Err(CpdError::InvalidConfig(format!(
                "scenario {}: {} phases but {} change points",
                self.name,
                self.generator.phases(),
                self.change_points.len()
            )));
        }
        for (i, &cp) in self.change_points.iter().enumerate() {
            if cp == 0 || cp >= self.n || (i > 0 && self.change_points[i - 1] >= cp) {
                return Err(CpdError::InvalidConfig(format!(
                    "scenario {}: change points {:?} must increase strictly inside (0, {})",
                    self.name, self.change_points, self.n
                )));
            }
        }
        if self.reps < 50 {
            return Err(CpdError::InvalidConfig(format!(
                "scenario {}: at least 50 replicates required, got {}",
                self.name, self.reps
            )));
        }
        if self.mode == Mode::Single && self.change_points.len() > 1 {
            return Err(CpdError::InvalidConfig(format!(
                "scenario {}: single-change mode with {} change points",
                self.name,
                self.change_points.len()
            )));
        }
        self.window.validate()?;
        self.engine.check(self.statistic)
    }

    fn segmentation(&self, seed: u64) -> SegmentationConfig {
        SegmentationConfig {
            alpha: self.alpha,
            n_min: self.n_min,
            statistic: self.statistic,
            engine: EngineConfig { seed, ..self.engine },
            window: self.window,
        }
    }
}

/// Draws one sequence of the scenario from `rep_seed`.
pub fn generate(spec: &ScenarioSpec, rep_seed: u64) -> Result<Sequence> {
    spec.generator.validate()?;
    let mut rng = stream_rng(rep_seed, 0);
    let mut phase = 0;
    let items = (0..spec.n)
        .map(|i| {
            while phase < spec.change_points.len() && i >= spec.change_points[phase] {
                phase += 1;
            }
            spec.generator.draw(&mut rng, phase.min(spec.generator.phases() - 1))
        })
        .collect();
    Sequence::new(items)
}

/// Outcome of one replicate.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RepOutcome {
    rejected: bool,
    loc_err: Option<f64>,
    rand: Option<f64>,
}

fn run_rep(spec: &ScenarioSpec, rep: usize) -> Result<RepOutcome> {
    let data_seed = derive_seed(spec.seed, TAG_DATA, rep as u64);
    let engine_seed = derive_seed(spec.seed, TAG_ENGINE, rep as u64);
    let seq = generate(spec, data_seed)?;
    let d = build_distance_matrix(&spec.metric, &seq)?;
    match spec.mode {
        Mode::Single => {
            let bounds = spec.window.bounds(spec.n)?;
            let engine = EngineConfig {
                seed: engine_seed,
                ..spec.engine
            };
            let det = detect(&d, spec.statistic, bounds, &engine)?;
            let loc_err = spec
                .change_points
                .first()
                .map(|&cp| (det.tau_hat() as f64 - cp as f64).abs());
            Ok(RepOutcome {
                rejected: det.p_value.value <= spec.alpha,
                loc_err,
                rand: None,
            })
        }
        Mode::Multiple => {
            let tree = binary_segment(&d, &spec.segmentation(engine_seed))?;
            let truth = changepoints_to_partition(&spec.change_points, spec.n)?;
            let found = changepoints_to_partition(&tree.change_points, spec.n)?;
            Ok(RepOutcome {
                rejected: !tree.change_points.is_empty(),
                loc_err: None,
                rand: Some(rand_index(&truth, &found)?),
            })
        }
    }
}

/// Aggregated result of one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub statistic: Statistic,
    pub engine: String,
    pub reps: usize,
    /// Fraction of replicates rejecting at `alpha` (at least one change point
    /// found, for segmentation scenarios).
    pub power: f64,
    pub power_se: f64,
    pub loc_err: Option<f64>,
    pub loc_err_se: Option<f64>,
    pub rand: Option<f64>,
    pub rand_se: Option<f64>,
    pub seconds: Option<f64>,
    /// Replicates that failed and are excluded from the averages.
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed_scheme: String,
    pub results: Vec<ScenarioResult>,
}

impl Default for ExperimentReport {
    fn default() -> Self {
        Self {
            seed_scheme: SEED_SCHEME.to_string(),
            results: Vec::new(),
        }
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Replicates one scenario. `timing` records wall time in the result.
pub fn run_scenario(spec: &ScenarioSpec, timing: bool) -> Result<ScenarioResult> {
    spec.validate()?;
    let start = Instant::now();
    let outcomes: Vec<Result<RepOutcome>> =
        (0..spec.reps).into_par_iter().map(|rep| run_rep(spec, rep)).collect();
    let mut ok = Vec::with_capacity(outcomes.len());
    let mut failures = 0;
    for (rep, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => ok.push(o),
            Err(e) => {
                log::warn!("scenario {} replicate {rep} failed: {e}", spec.name);
                failures += 1;
            }
        }
    }
    if ok.is_empty() {
        return Err(CpdError::InvalidConfig(format!(
            "scenario {}: every replicate failed",
            spec.name
        )));
    }
    let reps = ok.len();
    let power = ok.iter().filter(|o| o.rejected).count() as f64 / reps as f64;
    let collect = |f: fn(&RepOutcome) -> Option<f64>| -> Option<(f64, f64)> {
        let xs: Vec<f64> = ok.iter().filter_map(f).collect();
        (!xs.is_empty()).then(|| mean_se(&xs))
    };
    let loc = collect(|o| o.loc_err);
    let rand = collect(|o| o.rand);
    Ok(ScenarioResult {
        scenario: spec.name.clone(),
        statistic: spec.statistic,
        engine: spec.engine_label(),
        reps,
        power,
        power_se: (power * (1.0 - power) / reps as f64).sqrt(),
        loc_err: loc.map(|v| v.0),
        loc_err_se: loc.map(|v| v.1),
        rand: rand.map(|v| v.0),
        rand_se: rand.map(|v| v.1),
        seconds: timing.then(|| start.elapsed().as_secs_f64()),
        failures,
    })
}

/// Runs every scenario in order.
pub fn run_experiment(specs: &[ScenarioSpec], timing: bool) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::default();
    for spec in specs {
        log::info!("running scenario {} ({} reps)", spec.name, spec.reps);
        report.results.push(run_scenario(spec, timing)?);
    }
    Ok(report)
}

pub const CSV_COLUMNS: [&str; 11] = [
    "scenario",
    "statistic",
    "engine",
    "reps",
    "power",
    "power_se",
    "loc_err",
    "loc_err_se",
    "rand",
    "rand_se",
    "seconds",
];

fn csv_cell(out: &mut String, v: Option<f64>) {
    if let Some(v) = v {
        let _ = write!(out, "{v}");
    }
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn report_to_csv_string(report: &ExperimentReport) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in &report.results {
        let _ = write!(
            out,
            "{},{},{},{},{},{},",
            csv_text(&r.scenario),
            r.statistic,
            csv_text(&r.engine),
            r.reps,
            r.power,
            r.power_se
        );
        for (i, v) in [r.loc_err, r.loc_err_se, r.rand, r.rand_se, r.seconds]
            .into_iter()
            .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            csv_cell(&mut out, v);
        }
        out.push('\n');
    }
    out
}

pub fn report_to_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, report_to_csv_string(report))?;
    Ok(())
}

pub fn report_to_json_string(report: &ExperimentReport) -> String {
    serde_json::to_string_pretty(report).expect("report is serializable")
}

pub fn report_to_json(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, report_to_json_string(report))?;
    Ok(())
}

pub fn report_from_json(text: &str) -> Result<ExperimentReport> {
    serde_json::from_str(text).map_err(|e| CpdError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 12] = [
    "table1",
    "table2a-mean",
    "table2a-scale",
    "table2a-both",
    "table2b",
    "table2c",
    "table3-mean",
    "table3-scale",
    "table3-both",
    "table3-network",
    "table3-functional",
    "table3-null",
];

fn asymptotic() -> EngineConfig {
    EngineConfig::new(PValueMethod::Asymptotic)
}

fn corrected() -> EngineConfig {
    EngineConfig::new(PValueMethod::Corrected).with_variant(CorrectionVariant::AppendixDerived)
}

/// The three statistic/engine pairs compared in the power tables.
fn compared(base: ScenarioSpec) -> Vec<ScenarioSpec> {
    vec![
        base.clone().with_statistic(Statistic::S1, asymptotic()),
        base.clone().with_statistic(Statistic::S2Tilde, corrected()),
        base.with_statistic(Statistic::S3, asymptotic()),
    ]
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Scenario list of a named preset. `reps` overrides the default count.
pub fn preset(name: &str, reps: Option<usize>, seed: u64) -> Result<Vec<ScenarioSpec>> {
    const DIMS: [usize; 5] = [1, 10, 50, 100, 500];
    let amoc = |label: String, g: Generator| ScenarioSpec::new(label, g, 100, vec![33]);
    let multi = |label: String, g: Generator| {
        ScenarioSpec::new(label, g, 150, vec![40, 100]).multiple()
    };
    let mut specs: Vec<ScenarioSpec> = match name {
        "table1" => {
            let rows = [
                ("N(0,1)", Generator::gauss_null(1)),
                ("N(0,I10)", Generator::gauss_null(10)),
                ("N(0,I100)", Generator::gauss_null(100)),
                (
                    "Pois(2)",
                    Generator::Poisson {
                        dim: 1,
                        lambda: vec![2.0],
                    },
                ),
            ];
            rows.into_iter()
                .flat_map(|(label, g)| {
                    let base = ScenarioSpec::new(format!("table1/{label}"), g, 200, vec![]).with_reps(200);
                    vec![
                        base.clone().with_statistic(Statistic::S1, asymptotic()),
                        base.clone().with_statistic(Statistic::S2Tilde, corrected()),
                        base.with_statistic(Statistic::S2, asymptotic()),
                    ]
                })
                .collect()
        }
        "table2a-mean" => DIMS
            .iter()
            .zip([0.8, 0.3, 0.2, 0.2, 0.1])
            .flat_map(|(&dim, mu)| {
                compared(amoc(
                    format!("table2a-mean/dim={dim},mu={}", fmt_num(mu)),
                    Generator::gauss_mean_shift(dim, mu),
                ))
            })
            .collect(),
        "table2a-scale" => DIMS
            .iter()
            .zip([2.0, 1.2, 1.06, 1.05, 1.03])
            .flat_map(|(&dim, sigma)| {
                compared(amoc(
                    format!("table2a-scale/dim={dim},sigma={}", fmt_num(sigma)),
                    Generator::gauss_scale_shift(dim, sigma),
                ))
            })
            .collect(),
        "table2a-both" => {
            let mut v: Vec<ScenarioSpec> = DIMS
                .iter()
                .zip([(2.0, 2.0), (0.6, 1.2), (0.4, 1.06), (0.4, 1.05), (0.2, 1.03)])
                .flat_map(|(&dim, (mu, sigma))| {
                    compared(amoc(
                        format!("table2a-both/dim={dim},mu={},sigma={}", fmt_num(mu), fmt_num(sigma)),
                        Generator::gauss_both(dim, mu, sigma),
                    ))
                })
                .collect();
            v.extend(compared(amoc(
                "table2a-both/Pois(2)->Pois(4)".into(),
                Generator::poisson_shift(2.0, 4.0),
            )));
            v
        }
        "table2b" => [0.3, 0.4, 0.5]
            .into_iter()
            .flat_map(|p1| {
                compared(amoc(
                    format!("table2b/p1={}", fmt_num(p1)),
                    Generator::erdos_renyi(10, 0.1, p1, 3),
                ))
            })
            .collect(),
        "table2c" => [0.03, 0.05, 0.08, 0.1]
            .into_iter()
            .flat_map(|mu| {
                compared(amoc(
                    format!("table2c/mu={}", fmt_num(mu)),
                    Generator::functional_phase(1000, 0.5, mu),
                ))
            })
            .collect(),
        "table3-mean" => DIMS
            .iter()
            .zip([(2.0, 1.0), (0.5, 0.2), (0.5, 0.2), (0.3, 0.1), (0.2, 0.1)])
            .flat_map(|(&dim, (m1, m2))| {
                compared(multi(
                    format!("table3-mean/dim={dim},mu=({},{})", fmt_num(m1), fmt_num(m2)),
                    Generator::Gaussian {
                        dim,
                        mu: vec![0.0, m1, m2],
                        sigma: vec![1.0; 3],
                    },
                ))
            })
            .collect(),
        "table3-scale" => DIMS
            .iter()
            .zip([(2.0, 2f64.sqrt()), (1.2, 1.2), (1.06, 1.06), (1.05, 1.05), (1.03, 1.03)])
            .flat_map(|(&dim, (s1, s2))| {
                compared(multi(
                    format!("table3-scale/dim={dim},sigma=({},{})", fmt_num(s1), fmt_num(s2)),
                    Generator::Gaussian {
                        dim,
                        mu: vec![0.0; 3],
                        sigma: vec![1.0, s1, s2],
                    },
                ))
            })
            .collect(),
        "table3-both" => {
            let rows = [
                (2.0, 2.0, 1.0, 2f64.sqrt()),
                (0.6, 1.2, 0.3, 1.2),
                (0.4, 1.06, 0.2, 1.06),
                (0.4, 1.05, 0.2, 1.05),
                (0.2, 1.03, 0.1, 1.03),
            ];
            let mut v: Vec<ScenarioSpec> = DIMS
                .iter()
                .zip(rows)
                .flat_map(|(&dim, (m1, s1, m2, s2))| {
                    compared(multi(
                        format!(
                            "table3-both/dim={dim},mu=({},{}),sigma=({},{})",
                            fmt_num(m1),
                            fmt_num(s1),
                            fmt_num(m2),
                            fmt_num(s2)
                        ),
                        Generator::Gaussian {
                            dim,
                            mu: vec![0.0, m1, m2],
                            sigma: vec![1.0, s1, s2],
                        },
                    ))
                })
                .collect();
            v.extend(compared(multi(
                "table3-both/Pois(4)->Pois(6)->Pois(4)".into(),
                Generator::Poisson {
                    dim: 1,
                    lambda: vec![4.0, 6.0, 4.0],
                },
            )));
            v
        }
        "table3-network" => [0.3, 0.4, 0.5]
            .into_iter()
            .flat_map(|p1| {
                compared(multi(
                    format!("table3-network/p1={}", fmt_num(p1)),
                    Generator::ErdosRenyi {
                        nodes: 10,
                        p0: 0.1,
                        p_in: vec![0.1, p1, 0.1],
                        community_size: 3,
                    },
                ))
            })
            .collect(),
        "table3-functional" => [0.03, 0.05, 0.08, 0.1]
            .into_iter()
            .flat_map(|mu| {
                compared(multi(
                    format!("table3-functional/mu={}", fmt_num(mu)),
                    Generator::Functional {
                        grid: 1000,
                        noise_sd: 0.5,
                        shift: vec![0.0, 2.0 * mu, mu],
                    },
                ))
            })
            .collect(),
        "table3-null" => compared(
            ScenarioSpec::new("table3-null/N(0,I100)", Generator::gauss_null(100), 150, vec![])
                .multiple(),
        ),
        other => {
            return Err(CpdError::InvalidConfig(format!(
                "unknown scenario preset {other:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    };
    for s in specs.iter_mut() {
        s.seed = seed;
        if let Some(r) = reps {
            s.reps = r;
        }
    }
    Ok(specs)
}
