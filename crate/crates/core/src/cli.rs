// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end: `detect`, `segment`, `pvalue`, `simulate`, `distances`.
//!
//! Exit codes: 0 success, 1 input or configuration error, 2 degenerate
//! dispersion, 3 numerical failure.

use crate::data::{DistanceMatrix, ScanWindow, WindowBounds};
use crate::detect::{detect, metric_warning, EngineConfig};
use crate::distance::{build_distance_matrix, Metric};
use crate::error::{CpdError, Result};
use crate::io::{format_distance_matrix, parse_distance_matrix, parse_sequence, SequenceFormat};
use crate::kernel::estimate_eigenvalues;
use crate::null::{
    permutation_null, pvalue_from_null, pvalue_s2_corrected, simulate_null_s1,
    simulate_null_s1_tilde, simulate_null_s2, CorrectionVariant, PValue, PValueMethod,
};
use crate::scan::{moments, Statistic};
use crate::segment::{binary_segment, SegmentationConfig};
use crate::sim::{preset, report_to_csv_string, report_to_json_string, run_experiment, ScenarioSpec};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "wgcpd", version, about = "Distance-based change-point detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Detect a single change point and report its p-value.
    Detect(DetectArgs),
    /// Detect multiple change points by binary segmentation.
    Segment(SegmentArgs),
    /// P-value of a given statistic value.
    Pvalue(PvalueArgs),
    /// Replicated simulation experiments.
    Simulate(SimulateArgs),
    /// Compute and write the pairwise distance matrix.
    Distances(DistancesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Sqeuclidean,
    Frobenius,
    L2fun,
    Deltacon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    #[value(name = "S1")]
    S1,
    #[value(name = "S1t")]
    S1t,
    #[value(name = "S2")]
    S2,
    #[value(name = "S2t")]
    S2t,
    #[value(name = "S3")]
    S3,
}

impl From<StatisticArg> for Statistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::S1 => Statistic::S1,
            StatisticArg::S1t => Statistic::S1Tilde,
            StatisticArg::S2 => Statistic::S2,
            StatisticArg::S2t => Statistic::S2Tilde,
            StatisticArg::S3 => Statistic::S3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PvalueArg {
    Asymptotic,
    Corrected,
    Permutation,
}

impl From<PvalueArg> for PValueMethod {
    fn from(p: PvalueArg) -> Self {
        match p {
            PvalueArg::Asymptotic => PValueMethod::Asymptotic,
            PvalueArg::Corrected => PValueMethod::Corrected,
            PvalueArg::Permutation => PValueMethod::Permutation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Main,
    Appendix,
}

impl From<VariantArg> for CorrectionVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Main => CorrectionVariant::MainText,
            VariantArg::Appendix => CorrectionVariant::AppendixDerived,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

/// Where the observations come from.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Sequence file; its layout follows the metric (CSV rows for vectors and
    /// functions, blank-line separated 0/1 blocks for graphs).
    #[arg(long, conflicts_with = "distance_matrix")]
    pub input: Option<PathBuf>,
    /// Precomputed square distance matrix (CSV).
    #[arg(long)]
    pub distance_matrix: Option<PathBuf>,
    /// Distance between observations [default: sqeuclidean].
    #[arg(long, value_enum, conflicts_with = "distance_matrix")]
    pub metric: Option<MetricArg>,
    /// Domain length for the l2fun metric.
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
    pub interval: f64,
}

#[derive(Args, Debug, Clone)]
pub struct WindowArgs {
    /// Lower scan fraction.
    #[arg(long, default_value_t = 0.1)]
    pub rho0: f64,
    /// Upper scan fraction.
    #[arg(long, default_value_t = 0.9)]
    pub rho1: f64,
    /// Explicit first candidate split (overrides --rho0).
    #[arg(long)]
    pub grid_start: Option<usize>,
    /// Explicit last candidate split (overrides --rho1).
    #[arg(long)]
    pub grid_end: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    /// Scan statistic.
    #[arg(long, value_enum, default_value = "S1")]
    pub statistic: StatisticArg,
    /// P-value engine.
    #[arg(long = "pvalue", alias = "engine", value_enum, default_value = "asymptotic")]
    pub pvalue: PvalueArg,
    /// Which form of the corrected tail to evaluate.
    #[arg(long, value_enum, default_value = "appendix")]
    pub correction_variant: VariantArg,
    /// Monte-Carlo draws or permutations [default: 2000 / 1000].
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Significance level for accepting a split.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Minimum segment length.
    #[arg(long, default_value_t = 20)]
    pub nmin: usize,
}

#[derive(Args, Debug)]
pub struct PvalueArgs {
    /// Observed statistic value.
    #[arg(long)]
    pub observed: f64,
    /// Sequence length; required when no data is given.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Preset name (table1, table2a-mean, ..., table3-null) or a JSON file of scenarios.
    #[arg(long)]
    pub scenario: String,
    /// Replicates per scenario (overrides the preset).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record wall time in the `seconds` column.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct DistancesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

impl InputArgs {
    fn metric(&self) -> Metric {
        match self.metric.unwrap_or(MetricArg::Sqeuclidean) {
            MetricArg::Sqeuclidean => Metric::SqEuclidean,
            MetricArg::Frobenius => Metric::FrobeniusSq,
            MetricArg::L2fun => Metric::L2Functional {
                interval: self.interval,
            },
            MetricArg::Deltacon => Metric::DeltaCon,
        }
    }

    fn has_data(&self) -> bool {
        self.input.is_some() || self.distance_matrix.is_some()
    }

    /// Reads the distance matrix, either directly or from a sequence file.
    fn load(&self) -> Result<(DistanceMatrix, Option<Metric>)> {
        if let Some(path) = &self.distance_matrix {
            return Ok((parse_distance_matrix(&read(path)?)?, None));
        }
        let Some(path) = &self.input else {
            return Err(CpdError::InvalidConfig(
                "one of --input or --distance-matrix is required".into(),
            ));
        };
        let metric = self.metric();
        metric.validate()?;
        let text = read(path)?;
        let found = sniff_kind(&text);
        let graph_metric = metric.kind() == "graph";
        if graph_metric != (found == "graph") {
            return Err(CpdError::KindMismatch {
                metric: metric.name(),
                kind: found,
            });
        }
        let format = match metric.kind() {
            "graph" => SequenceFormat::GraphStack,
            "function" => SequenceFormat::FunctionalCsv,
            _ => SequenceFormat::VectorCsv,
        };
        let seq = parse_sequence(&text, format)?;
        Ok((build_distance_matrix(&metric, &seq)?, Some(metric)))
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        CpdError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

/// Guesses the observation kind of a sequence file: comma separated rows are
/// vectors, rows of several whitespace separated cells are graph blocks.
fn sniff_kind(text: &str) -> &'static str {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if text.contains(',') {
        return "vector";
    }
    if lines.any(|l| l.split_whitespace().count() > 1) {
        "graph"
    } else {
        "vector"
    }
}

impl WindowArgs {
    fn window(&self) -> Result<ScanWindow> {
        ScanWindow::new(self.rho0, self.rho1)
    }

    fn bounds(&self, n: usize) -> Result<WindowBounds> {
        let from_fracs = self.window()?.bounds(n)?;
        if self.grid_start.is_none() && self.grid_end.is_none() {
            return Ok(from_fracs);
        }
        WindowBounds::explicit(
            n,
            self.grid_start.unwrap_or(from_fracs.n0),
            self.grid_end.unwrap_or(from_fracs.n1),
        )
    }

    fn to_json(&self, bounds: &WindowBounds) -> Value {
        json!({"rho0": self.rho0, "rho1": self.rho1, "n0": bounds.n0, "n1": bounds.n1})
    }
}

impl EngineArgs {
    fn config(&self) -> EngineConfig {
        EngineConfig {
            method: self.pvalue.into(),
            reps: self.reps,
            seed: self.seed,
            variant: self.correction_variant.into(),
            ..EngineConfig::default()
        }
    }
}

fn json_only(run: &RunArgs) -> Result<()> {
    if run.format == Some(FormatArg::Csv) {
        return Err(CpdError::InvalidConfig(
            "this subcommand writes JSON only".into(),
        ));
    }
    Ok(())
}

fn pvalue_json(p: &PValue) -> Value {
    json!({"p_value": p.value, "method": p.method.name(), "reps": p.reps, "mc_stderr": p.mc_stderr})
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn warn_metric(metric: Option<Metric>, method: PValueMethod, warnings: &mut Vec<String>) {
    if let Some(w) = metric.and_then(|m| metric_warning(&m, method)) {
        warnings.push(w);
    }
}

fn cmd_detect(args: &DetectArgs) -> Result<String> {
    json_only(&args.run)?;
    let (d, metric) = args.input.load()?;
    let bounds = args.window.bounds(d.n())?;
    let engine = args.engine.config();
    let which: Statistic = args.engine.statistic.into();
    let mut det = detect(&d, which, bounds, &engine)?;
    warn_metric(metric, engine.method, &mut det.diagnostics.warnings);
    let out = merge(
        json!({
            "statistic": which.name(),
            "value": det.stat.value,
            "tau_hat": det.tau_hat(),
        }),
        pvalue_json(&det.p_value),
    );
    let out = merge(
        out,
        json!({
            "n": d.n(),
            "window": args.window.to_json(&bounds),
            "seed": engine.seed,
            "diagnostics": det.diagnostics,
        }),
    );
    Ok(serde_json::to_string_pretty(&out).expect("serializable"))
}

fn cmd_segment(args: &SegmentArgs) -> Result<String> {
    json_only(&args.run)?;
    let (d, metric) = args.input.load()?;
    if args.window.grid_start.is_some() || args.window.grid_end.is_some() {
        return Err(CpdError::InvalidConfig(
            "segmentation scans every interval with --rho0/--rho1; --grid-start/--grid-end do not apply"
                .into(),
        ));
    }
    let cfg = SegmentationConfig {
        alpha: args.alpha,
        n_min: args.nmin,
        statistic: args.engine.statistic.into(),
        engine: args.engine.config(),
        window: args.window.window()?,
    };
    let mut warnings = Vec::new();
    warn_metric(metric, cfg.engine.method, &mut warnings);
    let tree = binary_segment(&d, &cfg)?;
    let out = json!({
        "statistic": cfg.statistic.name(),
        "method": cfg.engine.method.name(),
        "alpha": cfg.alpha,
        "n_min": cfg.n_min,
        "seed": cfg.engine.seed,
        "n": tree.n,
        "change_points": tree.change_points,
        "tree": tree.root,
        "warnings": warnings,
    });
    Ok(serde_json::to_string_pretty(&out).expect("serializable"))
}

fn cmd_pvalue(args: &PvalueArgs) -> Result<String> {
    json_only(&args.run)?;
    let which: Statistic = args.engine.statistic.into();
    let engine = args.engine.config();
    engine.check(which)?;
    let data = if args.input.has_data() {
        Some(args.input.load()?)
    } else {
        None
    };
    let n = match (&data, args.n) {
        (Some((d, _)), Some(n)) if d.n() != n => {
            return Err(CpdError::InvalidConfig(format!(
                "--n {n} disagrees with the data length {}",
                d.n()
            )))
        }
        (Some((d, _)), _) => d.n(),
        (None, Some(n)) => n,
        (None, None) => {
            return Err(CpdError::InvalidConfig(
                "--n is required when no data is given".into(),
            ))
        }
    };
    let need_data = |what: &str| {
        CpdError::InvalidConfig(format!("{what} needs --input or --distance-matrix"))
    };
    let bounds = args.window.bounds(n)?;
    let reps = engine.reps();
    let x = args.observed;
    let p = match engine.method {
        PValueMethod::Asymptotic => match which {
            Statistic::S1 | Statistic::S1Tilde => {
                let (d, _) = data.as_ref().ok_or_else(|| need_data("the S1 null"))?;
                let spectrum = estimate_eigenvalues(d, engine.truncation)?;
                let null = if which == Statistic::S1 {
                    simulate_null_s1(&spectrum, bounds, reps, engine.seed)?
                } else {
                    simulate_null_s1_tilde(&spectrum, bounds, reps, engine.seed)?
                };
                pvalue_from_null(&null, x)
            }
            Statistic::S2 | Statistic::S2Tilde => {
                pvalue_from_null(&simulate_null_s2(bounds, reps, engine.seed)?, x)
            }
            Statistic::S3 => {
                pvalue_from_null(&simulate_null_s2(bounds, reps, engine.seed)?.squared(), x)
            }
        },
        PValueMethod::Corrected => {
            let (d, _) = data.as_ref().ok_or_else(|| need_data("the corrected tail"))?;
            let x = if which == Statistic::S3 { x.max(0.0).sqrt() } else { x };
            pvalue_s2_corrected(x, &moments(d), bounds, engine.variant)?
        }
        PValueMethod::Permutation => {
            let (d, _) = data.as_ref().ok_or_else(|| need_data("the permutation engine"))?;
            pvalue_from_null(&permutation_null(d, which, bounds, reps, engine.seed)?, x)
        }
    };
    let out = merge(
        json!({"statistic": which.name(), "observed": x}),
        pvalue_json(&p),
    );
    let out = merge(
        out,
        json!({"n": n, "window": args.window.to_json(&bounds), "seed": engine.seed}),
    );
    Ok(serde_json::to_string_pretty(&out).expect("serializable"))
}

fn load_scenarios(args: &SimulateArgs) -> Result<Vec<ScenarioSpec>> {
    if args.scenario.ends_with(".json") {
        let text = read(Path::new(&args.scenario))?;
        let mut specs: Vec<ScenarioSpec> =
            serde_json::from_str(&text).map_err(|e| CpdError::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
        for s in specs.iter_mut() {
            if let Some(r) = args.reps {
                s.reps = r;
            }
        }
        Ok(specs)
    } else {
        preset(&args.scenario, args.reps, args.seed)
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    let specs = load_scenarios(args)?;
    let report = run_experiment(&specs, args.timing)?;
    Ok(match args.run.format.unwrap_or(FormatArg::Csv) {
        FormatArg::Csv => report_to_csv_string(&report),
        FormatArg::Json => report_to_json_string(&report),
    })
}

fn cmd_distances(args: &DistancesArgs) -> Result<String> {
    if args.run.format == Some(FormatArg::Json) {
        return Err(CpdError::InvalidConfig(
            "distance matrices are written as CSV".into(),
        ));
    }
    if args.input.input.is_none() {
        return Err(CpdError::InvalidConfig("--input is required".into()));
    }
    let (d, _) = args.input.load()?;
    Ok(format_distance_matrix(&d))
}

fn emit(run: &RunArgs, mut text: String) -> Result<()> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &run.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let (run, text) = match &cli.command {
        Command::Detect(a) => (&a.run, with_threads(&a.run, || cmd_detect(a))?),
        Command::Segment(a) => (&a.run, with_threads(&a.run, || cmd_segment(a))?),
        Command::Pvalue(a) => (&a.run, with_threads(&a.run, || cmd_pvalue(a))?),
        Command::Simulate(a) => (&a.run, with_threads(&a.run, || cmd_simulate(a))?),
        Command::Distances(a) => (&a.run, with_threads(&a.run, || cmd_distances(a))?),
    };
    emit(run, text)
}

fn with_threads<T: Send>(run: &RunArgs, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match run.threads {
        None => f(),
        Some(0) => Err(CpdError::InvalidConfig("--threads must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CpdError::InvalidConfig(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn usage_for(sub: Option<&OsString>) -> clap::builder::StyledStr {
    let mut cmd = Cli::command();
    cmd.build();
    match sub
        .and_then(|s| s.to_str())
        .and_then(|s| cmd.find_subcommand_mut(s))
    {
        Some(sub) => sub.render_usage(),
        None => cmd.render_usage(),
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            eprintln!("\n{}", usage_for(args.get(1)));
            return 1;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
