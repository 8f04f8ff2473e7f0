//! Config-driven experiment runner behind the `driftkit` binary.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage error |
//! | 2 | config error (parse or validation) |
//! | 3 | runtime error |
//! | 4 | a counterexample assertion failed |

mod config;
mod counterexamples;
mod experiment;
mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

pub use config::{parse_config, ConfigError, ExperimentConfig, OutputFormat, Outputs};
pub use counterexamples::{
    format_table, run_counterexamples, CounterexampleRow, EXAMPLE1_N, EXAMPLE2_DELTA, EXAMPLE2_STEP_C, EXAMPLE3,
};
pub use experiment::{compute_bounds, run_bounds, run_experiment, run_oracle, run_simulation, RunError};
pub use report::{render, report_value, round_significant, Metadata, Report, ReportedBound, REPORT_DIGITS};

use crate::simulate::{with_workers, write_paths_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_COUNTEREXAMPLE: i32 = 4;

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "DRIFTKIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Bound,
    Simulate,
    Verify,
    Oracle,
    Counterexamples,
}

/// Parsed command line, independent of the argument parser.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub dump_paths: bool,
    pub threads: Option<usize>,
}

/// A failure mapped to its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(e) => e.into(),
            other => Failure {
                code: EXIT_RUNTIME,
                message: other.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            message: format!("i/o error: {e}"),
        }
    }
}

fn load(inv: &Invocation) -> Result<ExperimentConfig, Failure> {
    let path = inv.config.as_ref().ok_or(Failure {
        code: EXIT_USAGE,
        message: "--config is required for this command".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_CONFIG,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = inv.seed {
        config.simulation.master_seed = seed;
    }
    if let Some(trials) = inv.trials {
        config.simulation.trials = trials;
        config::check_simulation(&config.simulation)?;
    }
    if let Some(format) = inv.format {
        config.outputs.format = format;
    }
    if let Some(out) = &inv.out {
        config::check_writable("--out", out)?;
        config.outputs.report_path = Some(out.clone());
    }
    if inv.dump_paths {
        config::check_writable("outputs.paths_path", &config.outputs.paths_path)?;
        config.outputs.dump_paths = true;
    }
    Ok(config)
}

/// Rendered output and where it goes; `path: None` means stdout.
struct Output {
    code: i32,
    text: String,
    path: Option<PathBuf>,
    warning: Option<String>,
}

fn censoring_warning(report: &Report) -> Option<String> {
    let e = report.estimate?;
    (e.censored_count > 0).then(|| {
        format!(
            "warning: {} of {} trajectories censored at max_steps = {}; the estimate is a lower bound",
            e.censored_count, e.trials, report.metadata.max_steps
        )
    })
}

fn dump(config: &ExperimentConfig, batch: &crate::simulate::TrajectoryBatch) -> Result<(), Failure> {
    let mut file = BufWriter::new(File::create(&config.outputs.paths_path)?);
    write_paths_csv(batch, &mut file)?;
    file.flush()?;
    Ok(())
}

fn dispatch(command: Command, inv: &Invocation) -> Result<Output, Failure> {
    if command == Command::Counterexamples {
        let defaults = crate::simulate::SimulationConfig::default();
        let trials = inv.trials.unwrap_or(defaults.trials);
        if trials == 0 {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "--trials must be >= 1".into(),
            });
        }
        let rows = run_counterexamples(trials, inv.seed.unwrap_or(defaults.master_seed))?;
        let text = match inv.format {
            None => format_table(&rows),
            Some(format) => render(&rows, format),
        };
        return Ok(Output {
            code: if rows.iter().all(|r| r.passed) {
                EXIT_OK
            } else {
                EXIT_COUNTEREXAMPLE
            },
            text,
            path: inv.out.clone(),
            warning: None,
        });
    }

    let config = load(inv)?;
    let report = match command {
        Command::Bound => run_bounds(&config)?,
        Command::Oracle => run_oracle(&config)?,
        Command::Simulate => {
            let (report, batch) = experiment::run_simulation_with_batch(&config, config.outputs.dump_paths)?;
            if config.outputs.dump_paths {
                dump(&config, &batch)?;
            }
            report
        }
        Command::Verify => {
            let (report, batch) = experiment::run_experiment_with_batch(&config)?;
            if config.outputs.dump_paths {
                dump(&config, &batch)?;
            }
            report
        }
        Command::Counterexamples => unreachable!(),
    };
    Ok(Output {
        code: EXIT_OK,
        text: render(&report, config.outputs.format),
        path: config.outputs.report_path,
        warning: censoring_warning(&report),
    })
}

/// Runs one command and returns the process exit code. Errors are written
/// to `stderr`.
pub fn run(command: Command, inv: &Invocation, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let written = with_workers(inv.threads, || dispatch(command, inv)).and_then(|out| {
        if let Some(w) = &out.warning {
            let _ = writeln!(stderr, "{w}");
        }
        match &out.path {
            Some(path) => std::fs::write(path, &out.text)?,
            None => stdout.write_all(out.text.as_bytes())?,
        }
        Ok(out.code)
    });
    match written {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(stderr, "error: {}", failure.message);
            failure.code
        }
    }
}
