use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use driftkit::cli::{self, Command, Invocation, OutputFormat, EXIT_OK, EXIT_USAGE, THREADS_ENV};

/// Drift-theorem hitting-time bounds, checked against simulation.
#[derive(Parser)]
#[command(name = "driftkit", version)]
struct Args {
    #[command(subcommand)]
    command: Sub,
    /// Experiment config (required for bound, simulate, verify, oracle).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override simulation.master_seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override simulation.trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write every trajectory as CSV to outputs.paths_path.
    #[arg(long, global = true)]
    dump_paths: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Closed-form bounds only.
    Bound,
    /// Monte Carlo hitting-time estimate only.
    Simulate,
    /// Bounds, simulation, precondition checks and applicability.
    Verify,
    /// Exact hitting times of a finite chain.
    Oracle,
    /// Run the three worked examples and check their documented outcomes.
    Counterexamples,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK } as u8);
        }
    };
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {v:?}");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        },
        Err(_) => None,
    };
    let command = match args.command {
        Sub::Bound => Command::Bound,
        Sub::Simulate => Command::Simulate,
        Sub::Verify => Command::Verify,
        Sub::Oracle => Command::Oracle,
        Sub::Counterexamples => Command::Counterexamples,
    };
    let inv = Invocation {
        config: args.config,
        seed: args.seed,
        trials: args.trials,
        format: args.format.map(|f| match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }),
        out: args.out,
        dump_paths: args.dump_paths,
        threads,
    };
    let code = cli::run(command, &inv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
