use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mvi_core::bench::{self, ExperimentConfig, ProblemSource};
use mvi_core::problems::{build_example41, build_example42, verify_solution};
use mvi_core::{MviError, Point};

#[derive(Parser)]
#[command(name = "mvi-bench", version, about = "Benchmarks for the inertial Tseng MVI solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    #[value(name = "41")]
    E41,
    #[value(name = "42")]
    E42,
}

#[derive(Clone, Copy, ValueEnum)]
enum Selection {
    Midpoint,
    Lower,
    Upper,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep tolerances on a built-in example.
    Bench {
        #[arg(long, value_enum)]
        example: Example,
        /// Comma-separated tolerances, strictly decreasing.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        eps_list: Option<Vec<String>>,
        #[arg(long, value_enum, default_value = "midpoint")]
        selection: Selection,
        /// Seed for `--selection random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "bench_out")]
        out: PathBuf,
    },
    /// Check the VI condition at a point of a built-in example by sampling.
    Verify {
        #[arg(long, value_enum)]
        example: Example,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve { config } => match bench::load_config(&config) {
            Ok(cfg) => run(&cfg),
            Err(e) => usage_error(e),
        },
        Command::Bench {
            example,
            eps_list,
            selection,
            seed,
            out,
        } => match bench_config(example, eps_list, selection, seed, out) {
            Ok(cfg) => run(&cfg),
            Err(e) => usage_error(e),
        },
        Command::Verify {
            example,
            point,
            samples,
        } => verify(example, point, samples),
    };
    ExitCode::from(code)
}

fn bench_config(
    example: Example,
    eps_list: Option<Vec<String>>,
    selection: Selection,
    seed: u64,
    out: PathBuf,
) -> mvi_core::Result<ExperimentConfig> {
    let source = match example {
        Example::E41 => ProblemSource::Example41,
        Example::E42 => ProblemSource::Example42,
    };
    let mut cfg = ExperimentConfig::example(source, out)?;
    if let Some(list) = eps_list {
        cfg.tolerances = list
            .iter()
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| MviError::Config(format!("bad tolerance {s:?}")))
            })
            .collect::<mvi_core::Result<_>>()?;
    }
    cfg.params.selection = bench::parse_selection(
        match selection {
            Selection::Midpoint => "midpoint",
            Selection::Lower => "lower",
            Selection::Upper => "upper",
            Selection::Random => "random",
        },
        seed,
    )?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cfg: &ExperimentConfig) -> u8 {
    match bench::run_bench(cfg) {
        Ok(outcome) => {
            print!("{}", outcome.summary_csv());
            for row in &outcome.rows {
                if let Some(report) = &row.report {
                    for w in &report.warnings {
                        eprintln!("warning (eps {:e}): {w}", row.epsilon);
                    }
                }
            }
            eprintln!("wrote {}", cfg.output.display());
            outcome.exit_code() as u8
        }
        Err(e @ MviError::Config(_)) => usage_error(e),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn verify(example: Example, point: Vec<f64>, samples: usize) -> u8 {
    let problem = match example {
        Example::E41 => build_example41(),
        Example::E42 => build_example42(),
    };
    let result = Point::new(point).and_then(|x| verify_solution(&problem, &x, samples));
    match result {
        Ok((passed, worst)) => {
            println!(
                "{} worst_violation={worst:e}",
                if passed { "pass" } else { "fail" }
            );
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => usage_error(e),
    }
}

fn usage_error(e: MviError) -> u8 {
    eprintln!("error: {e}");
    2
}
