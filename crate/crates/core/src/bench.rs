//! Tolerance sweeps over a problem, with CSV output.
//!
//! A run writes `summary.csv` (one row per tolerance, columns
//! `epsilon,iterations,seconds,final_residual,status`) and one
//! `trace_<eps>.csv` per tolerance with columns
//! `n,residual_norm,error_to_known_solution,lambda,m,cumulative_seconds`.
//!
//! Experiments are described by a flat TOML file:
//!
//! ```toml
//! problem = "example41"        # example41 | example42 | custom
//! # problem_file = "my.toml"   # custom problems only, relative to this file
//! tolerances = [1e-1, 1e-2, 1e-3, 1e-4]
//! output = "out"
//! # Optional for the built-in examples, required for custom problems:
//! mu = 0.98
//! gamma = 0.91
//! alpha = 0.03
//! x0 = [10.0, 10.0]
//! x1 = [10.0, 10.0]
//! # Optional:
//! max_iters = 10000
//! max_linesearch = 100
//! validation = "warn"          # strict | warn | off
//! selection = "midpoint"       # midpoint | lower | upper | random
//! seed = 0                     # used by selection = "random"
//! ```
//!
//! A custom problem file describes a box or sum-constrained box and an affine
//! segment-valued operator `A(x) = {M x + q + t d : t ∈ [t_min, t_max]}`:
//!
//! ```toml
//! known_solution = [0.0, 0.0]  # optional
//!
//! [set]
//! kind = "box"                 # box | hyperplane_box
//! lower = [0.0, 0.0]
//! upper = [10.0, 10.0]
//! # rhs = 1.0                  # hyperplane_box only
//!
//! [operator]
//! matrix = [[1.0, 0.0], [0.0, 1.0]]
//! offset = [0.0, 0.0]
//! direction = [1.0, 0.0]
//! t_range = [0.0, 0.2]
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use crate::error::{MviError, Result};
use crate::operator::{SelectionStrategy, SetValuedMap};
use crate::point::Point;
use crate::problem::{SolverParams, VIProblem, ValidationMode};
use crate::problems::{
    build_example41, build_example42, example41_params, example41_start, example42_params,
    example42_start,
};
use crate::set::FeasibleSet;
use crate::solver::{solve, SolveReport};

pub const SUMMARY_HEADER: &str = "epsilon,iterations,seconds,final_residual,status";
pub const TRACE_HEADER: &str = "n,residual_norm,error_to_known_solution,lambda,m,cumulative_seconds";

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Example41,
    Example42,
    Custom(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemSource,
    /// Solver settings; `epsilon` is overwritten by each sweep entry.
    pub params: SolverParams,
    pub x0: Point,
    pub x1: Point,
    pub tolerances: Vec<f64>,
    pub output: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for a built-in example: its parameters, start point and
    /// sweep, writing to `output`.
    pub fn example(source: ProblemSource, output: impl Into<PathBuf>) -> Result<Self> {
        let (params, start, tolerances) = match source {
            ProblemSource::Example41 => {
                (example41_params(), example41_start(), vec![1e-1, 1e-2, 1e-3, 1e-4])
            }
            ProblemSource::Example42 => (example42_params(), example42_start(), vec![1e-3, 1e-5, 1e-7]),
            ProblemSource::Custom(_) => {
                return Err(MviError::Config(
                    "custom problems have no default experiment".into(),
                ))
            }
        };
        Ok(Self {
            problem: source,
            params,
            x0: start.clone(),
            x1: start,
            tolerances,
            output: output.into(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerances.is_empty() {
            return Err(MviError::Config("tolerance list is empty".into()));
        }
        if self.tolerances.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(MviError::Config("tolerances must be positive".into()));
        }
        if self.tolerances.windows(2).any(|w| w[1] >= w[0]) {
            return Err(MviError::Config(
                "tolerances must be strictly decreasing".into(),
            ));
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<VIProblem> {
        match &self.problem {
            ProblemSource::Example41 => Ok(build_example41()),
            ProblemSource::Example42 => Ok(build_example42()),
            ProblemSource::Custom(path) => load_custom_problem(path),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: String,
    problem_file: Option<PathBuf>,
    tolerances: Vec<f64>,
    output: Option<PathBuf>,
    mu: Option<f64>,
    gamma: Option<f64>,
    alpha: Option<f64>,
    x0: Option<Vec<f64>>,
    x1: Option<Vec<f64>>,
    max_iters: Option<usize>,
    max_linesearch: Option<u32>,
    validation: Option<String>,
    selection: Option<String>,
    seed: Option<u64>,
}

pub fn parse_validation(s: &str) -> Result<ValidationMode> {
    match s.to_ascii_lowercase().as_str() {
        "strict" => Ok(ValidationMode::Strict),
        "warn" => Ok(ValidationMode::Warn),
        "off" => Ok(ValidationMode::Off),
        other => Err(MviError::Config(format!("unknown validation mode {other:?}"))),
    }
}

pub fn parse_selection(s: &str, seed: u64) -> Result<SelectionStrategy> {
    match s.to_ascii_lowercase().as_str() {
        "midpoint" => Ok(SelectionStrategy::Midpoint),
        "lower" => Ok(SelectionStrategy::LowerEnd),
        "upper" => Ok(SelectionStrategy::UpperEnd),
        "random" => Ok(SelectionStrategy::SeededRandom(seed)),
        other => Err(MviError::Config(format!("unknown selection {other:?}"))),
    }
}

fn config_point(v: Vec<f64>, name: &str) -> Result<Point> {
    Point::new(v).map_err(|e| MviError::Config(format!("{name}: {e}")))
}

/// Parses an experiment config. Relative paths resolve against `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| MviError::Config(e.to_string()))?;
    let source = match raw.problem.to_ascii_lowercase().as_str() {
        "example41" | "41" => ProblemSource::Example41,
        "example42" | "42" => ProblemSource::Example42,
        "custom" => {
            let file = raw.problem_file.ok_or_else(|| {
                MviError::Config("problem = \"custom\" needs problem_file".into())
            })?;
            ProblemSource::Custom(base_dir.join(file))
        }
        other => return Err(MviError::Config(format!("unknown problem {other:?}"))),
    };
    let output = base_dir.join(raw.output.unwrap_or_else(|| PathBuf::from("bench_out")));

    let mut config = match &source {
        ProblemSource::Custom(_) => {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| MviError::Config(format!("custom problems need {name}")))
            };
            let x0 = raw
                .x0
                .clone()
                .ok_or_else(|| MviError::Config("custom problems need x0".into()))?;
            let x1 = raw.x1.clone().unwrap_or_else(|| x0.clone());
            ExperimentConfig {
                problem: source.clone(),
                params: SolverParams::new(
                    need(raw.mu, "mu")?,
                    need(raw.gamma, "gamma")?,
                    need(raw.alpha, "alpha")?,
                    1.0,
                ),
                x0: config_point(x0, "x0")?,
                x1: config_point(x1, "x1")?,
                tolerances: Vec::new(),
                output: output.clone(),
            }
        }
        _ => ExperimentConfig::example(source.clone(), output.clone())?,
    };

    config.tolerances = raw.tolerances;
    if let Some(mu) = raw.mu {
        config.params.mu = mu;
    }
    if let Some(gamma) = raw.gamma {
        config.params.gamma = gamma;
    }
    if let Some(alpha) = raw.alpha {
        config.params.alpha = alpha;
    }
    if let Some(x0) = raw.x0 {
        config.x0 = config_point(x0.clone(), "x0")?;
        if raw.x1.is_none() {
            config.x1 = config_point(x0, "x1")?;
        }
    }
    if let Some(x1) = raw.x1 {
        config.x1 = config_point(x1, "x1")?;
    }
    if let Some(n) = raw.max_iters {
        config.params.max_iters = n;
    }
    if let Some(m) = raw.max_linesearch {
        config.params.max_linesearch = m;
    }
    if let Some(v) = raw.validation {
        config.params.validation = parse_validation(&v)?;
    }
    if let Some(s) = raw.selection {
        config.params.selection = parse_selection(&s, raw.seed.unwrap_or(0))?;
    }
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| MviError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    known_solution: Option<Vec<f64>>,
    set: RawSet,
    operator: RawOperator,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSet {
    kind: String,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rhs: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    matrix: Vec<Vec<f64>>,
    offset: Vec<f64>,
    direction: Vec<f64>,
    t_range: [f64; 2],
}

pub fn parse_custom_problem(text: &str) -> Result<VIProblem> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| MviError::Config(e.to_string()))?;
    let lo = config_point(raw.set.lower, "set.lower")?;
    let hi = config_point(raw.set.upper, "set.upper")?;
    let n = lo.dim();
    let set = match raw.set.kind.as_str() {
        "box" => FeasibleSet::boxed(lo, hi)?,
        "hyperplane_box" => {
            let rhs = raw
                .set
                .rhs
                .ok_or_else(|| MviError::Config("hyperplane_box needs rhs".into()))?;
            FeasibleSet::hyperplane_box(lo, hi, rhs)?
        }
        other => return Err(MviError::Config(format!("unknown set kind {other:?}"))),
    };

    let op = raw.operator;
    if op.matrix.len() != n || op.matrix.iter().any(|row| row.len() != n) {
        return Err(MviError::Config(format!("operator.matrix must be {n}x{n}")));
    }
    let offset = config_point(op.offset, "operator.offset")?;
    offset.check_dim(n)?;
    let direction = config_point(op.direction, "operator.direction")?;
    direction.check_dim(n)?;
    let matrix = op.matrix;
    let description = format!(
        "A(x) = {{M x + q + t d : t in [{}, {}]}}",
        op.t_range[0], op.t_range[1]
    );
    let map = SetValuedMap::segment(
        description,
        move |x| {
            Point::from(
                matrix
                    .iter()
                    .zip(offset.coords())
                    .map(|(row, q)| row.iter().zip(x.coords()).map(|(a, b)| a * b).sum::<f64>() + q)
                    .collect::<Vec<_>>(),
            )
        },
        direction,
        op.t_range[0],
        op.t_range[1],
    )?;
    let problem = VIProblem::new("custom", set, map);
    match raw.known_solution {
        Some(s) => problem.with_known_solution(config_point(s, "known_solution")?),
        None => Ok(problem),
    }
}

pub fn load_custom_problem(path: &Path) -> Result<VIProblem> {
    let text = fs::read_to_string(path)
        .map_err(|e| MviError::Config(format!("{}: {e}", path.display())))?;
    parse_custom_problem(&text)
}

#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub epsilon: f64,
    pub iterations: usize,
    pub seconds: f64,
    pub final_residual: f64,
    pub status: String,
    pub report: Option<SolveReport>,
}

impl SummaryRow {
    pub fn converged(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.converged())
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{:e},{},{},{:e},{}",
            self.epsilon, self.iterations, self.seconds, self.final_residual, self.status
        )
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub rows: Vec<SummaryRow>,
}

impl BenchOutcome {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(SummaryRow::converged)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_converged() {
            0
        } else {
            1
        }
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(SUMMARY_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }
}

pub fn trace_csv(report: &SolveReport, known_solution: Option<&Point>) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in &report.trace {
        let err = known_solution
            .and_then(|s| r.x.distance(s).ok())
            .map(|d| format!("{d:e}"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:e},{},{:e},{},{}",
            r.n, r.residual_norm, err, r.lambda, r.m, r.wallclock
        );
    }
    out
}

pub fn trace_file_name(epsilon: f64) -> String {
    format!("trace_{epsilon:e}.csv")
}

/// Solves once per tolerance without touching the filesystem.
pub fn run_sweep(config: &ExperimentConfig) -> Result<BenchOutcome> {
    config.validate()?;
    let problem = config.build_problem()?;
    let mut rows = Vec::with_capacity(config.tolerances.len());
    for &epsilon in &config.tolerances {
        let params = config.params.clone().with_epsilon(epsilon);
        let started = Instant::now();
        let outcome = solve(&problem, &params, &config.x0, &config.x1);
        let seconds = started.elapsed().as_secs_f64();
        rows.push(match outcome {
            Ok(report) => SummaryRow {
                epsilon,
                iterations: report.iterations,
                seconds,
                final_residual: report.final_residual,
                status: report.status.as_str().to_string(),
                report: Some(report),
            },
            Err(e) => SummaryRow {
                epsilon,
                iterations: 0,
                seconds,
                final_residual: f64::NAN,
                status: format!("error: {}", e.to_string().replace(',', ";")),
                report: None,
            },
        });
    }
    Ok(BenchOutcome { rows })
}

/// Runs the sweep and writes `summary.csv` and the per-tolerance traces.
pub fn run_bench(config: &ExperimentConfig) -> Result<BenchOutcome> {
    let outcome = run_sweep(config)?;
    let known = config.build_problem()?.known_solution;
    fs::create_dir_all(&config.output)?;
    fs::write(config.output.join("summary.csv"), outcome.summary_csv())?;
    for row in &outcome.rows {
        if let Some(report) = &row.report {
            fs::write(
                config.output.join(trace_file_name(row.epsilon)),
                trace_csv(report, known.as_ref()),
            )?;
        }
    }
    Ok(outcome)
}
