//! Command-line front end: `solve`, `sweep`, `check-critical` and
//! `list-problems`.
//!
//! Settings come from an optional `--config` file (flat `key = value` lines,
//! or a JSON object) and are overridden by flags. Usage and validation errors
//! exit with status 2.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::criticality::{sampled_pareto_clarke_test, smooth_criticality_residual, line_probe_descent, CriticalityReport, SampledTestOptions};
use crate::diagnostics::{export_run, run_csv, write_atomic, ExportFormat};
use crate::driver::{run_sppm, DriverParams, ExpTransform, RunRecord};
use crate::error::{Error, Result};
use crate::library::{by_id, catalog, catalog_ids};
use crate::problem::{Point, Problem};
use crate::scalarize::{ScalarizationParams, DEFAULT_ALPHA_BAR};
use crate::sweep::{sweep_csv, weight_sweep};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sppm", version, about = "Scalarization proximal point method for multiobjective problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run SPPM on one problem and export the iterate history.
    Solve(RunArgs),
    /// Run SPPM for a grid of bi-objective weights.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Grid intervals; weights t = 0, 1/grid, ..., 1.
        #[arg(long, default_value_t = 10)]
        grid: usize,
    },
    /// Test a point for Pareto-Clarke criticality.
    CheckCritical(CheckArgs),
    /// List the built-in problems.
    ListProblems,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpArg {
    Auto,
    On,
    Off,
}

impl From<ExpArg> for ExpTransform {
    fn from(a: ExpArg) -> Self {
        match a {
            ExpArg::Auto => ExpTransform::Auto,
            ExpArg::On => ExpTransform::On,
            ExpArg::Off => ExpTransform::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ExportFormat {
    fn from(a: FormatArg) -> Self {
        match a {
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Catalog id (see `list-problems`).
    #[arg(long)]
    pub problem: Option<String>,
    /// Weights z, comma separated; normalized to unit length.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub weights: Option<Vec<f64>>,
    /// Regularization direction e, comma separated; normalized. Default uniform.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub e: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub step_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub inner_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub exp_transform: Option<ExpArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Initial point, comma separated. Default: seeded uniform in [-5, 5]^n.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    /// Worker threads for sweeps.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Settings file, `key = value` per line or a JSON object.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Smooth test for smooth problems, sampled otherwise.
    Auto,
    Smooth,
    Sampled,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub problem: String,
    /// Point to test, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub point: Vec<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    /// Default 1e-5 for the smooth test, 1e-3 for the sampled one.
    #[arg(long)]
    pub crit_tol: Option<f64>,
    #[arg(long, default_value_t = 256)]
    pub n_dirs: usize,
    #[arg(long, default_value_t = 200)]
    pub qp_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Settings shared by `solve` and `sweep`, as read from a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: Option<String>,
    pub weights: Option<Vec<f64>>,
    pub e: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub max_iter: Option<usize>,
    pub step_tol: Option<f64>,
    pub inner_tol: Option<f64>,
    pub exp_transform: Option<ExpTransform>,
    pub seed: Option<u64>,
    pub x0: Option<Vec<f64>>,
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<ExportFormat>,
}

impl RunConfig {
    /// Parses `key = value` lines (`#` starts a comment). Values are read as
    /// JSON where possible, as comma-separated numbers when they contain a
    /// comma, and as bare strings otherwise. Text that does not parse that way
    /// is tried as a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        match Self::parse_flat(text) {
            Ok(c) => Ok(c),
            Err(flat) => serde_json::from_str(text)
                .map_err(|_| flat),
        }
    }

    fn parse_flat(text: &str) -> Result<Self> {
        let mut map = serde_json::Map::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParams(format!("config line {}: expected `key = value`", lineno + 1))
            })?;
            let value = value.trim();
            let parsed = serde_json::from_str::<serde_json::Value>(value).or_else(|_| {
                if value.contains(',') {
                    value
                        .split(',')
                        .map(|s| {
                            s.trim().parse::<f64>().map(serde_json::Value::from).map_err(|_| {
                                Error::InvalidParams(format!("config line {}: `{value}` is not a number list", lineno + 1))
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(serde_json::Value::Array)
                } else {
                    Ok(serde_json::Value::String(value.to_string()))
                }
            })?;
            map.insert(key.trim().to_string(), parsed);
        }
        serde_json::from_value(serde_json::Value::Object(map))
            .map_err(|e| Error::InvalidParams(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Flag values win over file values.
    fn overridden_by(self, a: &RunArgs) -> Self {
        Self {
            problem: a.problem.clone().or(self.problem),
            weights: a.weights.clone().or(self.weights),
            e: a.e.clone().or(self.e),
            alpha: a.alpha.or(self.alpha),
            max_iter: a.max_iter.or(self.max_iter),
            step_tol: a.step_tol.or(self.step_tol),
            inner_tol: a.inner_tol.or(self.inner_tol),
            exp_transform: a.exp_transform.map(Into::into).or(self.exp_transform),
            seed: a.seed.or(self.seed),
            x0: a.x0.clone().or(self.x0),
            jobs: a.jobs.or(self.jobs),
            output: a.output.clone().or(self.output),
            format: a.format.map(Into::into).or(self.format),
        }
    }

    pub fn from_args(a: &RunArgs) -> Result<Self> {
        let file = match &a.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        Ok(file.overridden_by(a))
    }

    pub fn problem(&self) -> Result<Problem> {
        let id = self
            .problem
            .as_deref()
            .ok_or_else(|| Error::InvalidParams("a problem is required (--problem)".into()))?;
        by_id(id)
    }

    /// Driver parameters for `problem`; `weights` may be omitted for a sweep.
    pub fn driver_params(&self, problem: &Problem) -> Result<DriverParams> {
        let m = problem.m();
        let uniform = vec![1.0; m];
        let weights = self.weights.as_deref().unwrap_or(&uniform);
        if weights.len() != m {
            return Err(Error::InvalidParams(format!(
                "--weights needs {m} entries for `{}`, got {}",
                problem.name(),
                weights.len()
            )));
        }
        let sp = ScalarizationParams::from_weights(weights, self.e.as_deref(), self.alpha.unwrap_or(1.0), DEFAULT_ALPHA_BAR)?;
        let mut p = DriverParams::new(sp);
        if let Some(v) = self.max_iter {
            p.max_outer_iters = v;
        }
        if let Some(v) = self.step_tol {
            p.step_tol = v;
        }
        if let Some(v) = self.inner_tol {
            p.inner.inner_tol = v;
        }
        if let Some(v) = self.exp_transform {
            p.exp_transform = v;
        }
        if let Some(v) = self.seed {
            p.seed = v;
        }
        if let Some(x0) = &self.x0 {
            p.initial_point = Some(Point::new(x0.clone())?);
        }
        p.validate(m)?;
        Ok(p)
    }
}

fn describe(err: &Error) -> String {
    match err {
        Error::UnknownProblem(id) => format!(
            "unknown problem id `{id}`; available: {}",
            catalog_ids().join(", ")
        ),
        other => other.to_string(),
    }
}

fn summary(run: &RunRecord) -> String {
    format!(
        "termination={} iterations={} criticality_residual={:e} critical={}",
        run.termination,
        run.iterations(),
        run.final_criticality.residual,
        run.final_criticality.critical
    )
}

fn emit(bytes: &[u8], output: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => write_atomic(p, bytes),
        None => out.write_all(bytes).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn cmd_solve(args: &RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::from_args(args)?;
    let problem = cfg.problem()?;
    let params = cfg.driver_params(&problem)?;
    let zero = params.schedule.at(0).zero_weight_indices();
    if !zero.is_empty() {
        let _ = writeln!(
            err,
            "warning: objectives {zero:?} have zero weight and influence the iterates only through the level-set constraint"
        );
    }
    let run = run_sppm(&problem, &params)?;
    let format = cfg.format.unwrap_or(ExportFormat::Csv);
    match (&cfg.output, format) {
        (Some(path), f) => {
            export_run(&run, f, path)?;
            let _ = writeln!(out, "{}", summary(&run));
        }
        (None, ExportFormat::Csv) => {
            emit(&run_csv(&run)?, None, out)?;
            let _ = writeln!(err, "{}", summary(&run));
        }
        (None, ExportFormat::Json) => {
            let text = serde_json::to_string_pretty(&run).map_err(|source| Error::Json {
                path: "<stdout>".into(),
                source,
            })?;
            let _ = writeln!(out, "{text}");
            let _ = writeln!(err, "{}", summary(&run));
        }
    }
    Ok(if run.termination.is_success() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_sweep(args: &RunArgs, grid: usize, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = RunConfig::from_args(args)?;
    let problem = cfg.problem()?;
    if cfg.weights.is_some() {
        let _ = writeln!(err, "warning: --weights is ignored by sweep");
    }
    let base = RunConfig { weights: None, ..cfg.clone() }.driver_params(&problem)?;
    let points = weight_sweep(&problem, &base, grid, cfg.jobs)?;
    let bytes = match cfg.format.unwrap_or(ExportFormat::Csv) {
        ExportFormat::Csv => sweep_csv(&points)?,
        ExportFormat::Json => serde_json::to_vec_pretty(&points).map_err(|source| Error::Json {
            path: cfg.output.clone().unwrap_or_else(|| "<stdout>".into()),
            source,
        })?,
    };
    emit(&bytes, cfg.output.as_deref(), out)?;
    let ok = points.iter().filter(|p| p.run.termination.is_success()).count();
    let _ = writeln!(
        err,
        "sweep: {} runs, {} converged, {} nondominated",
        points.len(),
        ok,
        points.iter().filter(|p| p.nondominated).count()
    );
    Ok(if ok == points.len() { EXIT_OK } else { EXIT_FAILED })
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let problem = by_id(&args.problem)?;
    if args.point.len() != problem.n() {
        return Err(Error::Dimension {
            expected: problem.n(),
            found: args.point.len(),
        });
    }
    let x = Point::new(args.point.clone())?;
    let smooth = match args.method {
        MethodArg::Auto => problem.is_smooth(),
        MethodArg::Smooth => true,
        MethodArg::Sampled => false,
    };
    let report: CriticalityReport = if smooth {
        smooth_criticality_residual(&problem, &x, args.qp_iters, args.crit_tol.unwrap_or(1e-5))?
    } else {
        let opts = SampledTestOptions {
            n_dirs: args.n_dirs,
            crit_tol: args.crit_tol.unwrap_or(1e-3),
            ..SampledTestOptions::default()
        };
        sampled_pareto_clarke_test(&problem, &x, &opts, args.seed)?
    };
    let text = serde_json::to_string_pretty(&report).map_err(|source| Error::Json {
        path: "<stdout>".into(),
        source,
    })?;
    let _ = writeln!(out, "{text}");
    if report.critical {
        return Ok(EXIT_OK);
    }
    if let Some(d) = &report.witness_direction {
        let probe = line_probe_descent(&problem, &x, d)?;
        let coords: Vec<String> = d.iter().map(|v| v.to_string()).collect();
        let _ = match probe {
            Some(t) => writeln!(out, "witness direction [{}] decreases every objective at t = {t:e}", coords.join(", ")),
            None => writeln!(out, "witness direction [{}] (no strict decrease found by line probe)", coords.join(", ")),
        };
    }
    Ok(EXIT_FAILED)
}

fn cmd_list(out: &mut dyn Write) -> Result<i32> {
    for (id, summary) in catalog() {
        let p = by_id(id)?;
        let f = p.flags();
        let _ = writeln!(
            out,
            "{id:<14} n={} m={} smooth={} convex={} quasiconvex={}  {summary}",
            p.n(),
            p.m(),
            f.smooth,
            f.claimed_convex,
            f.claimed_quasiconvex
        );
    }
    Ok(EXIT_OK)
}

/// Executes a parsed command, printing errors to `err`; returns the exit status.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Sweep { run, grid } => cmd_sweep(run, *grid, out, err),
        Command::CheckCritical(a) => cmd_check(a, out),
        Command::ListProblems => cmd_list(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", describe(&e));
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(out, "{}", e.render());
                EXIT_OK
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
