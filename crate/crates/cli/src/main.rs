use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helmfft_cli::config::{Mode, RunArgs};
use helmfft_cli::error::{CliError, Result};
use helmfft_cli::record::{emit, read_records};
use helmfft_cli::run::{check, configure_threads, run};
use helmfft_cli::slope::{slope_of, Column};

#[derive(Parser)]
#[command(name = "helmfft", version, about = "Fast direct solver for the Helmholtz equation with absorbing ends")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once per repeat and report timings and the residual.
    Solve(RunArgs),
    /// Like solve, plus the error against a dense direct solve.
    Verify(RunArgs),
    /// Timings over a list of sizes (`--sizes`).
    Bench(RunArgs),
    /// Fit the log-log slope of time against unknowns from bench records.
    Slope {
        /// CSV or JSON file written by `bench`.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Column::Solve)]
        column: Column,
        /// Accepted slope range `lo:hi`; outside it the exit status is 4.
        #[arg(long)]
        expect: Option<String>,
    },
}

fn run_mode(mode: Mode, args: RunArgs) -> Result<()> {
    let cfg = args.into_config(mode)?;
    configure_threads(cfg.threads);
    let records = run(&cfg)?;
    emit(&records, cfg.format, cfg.out.as_deref())?;
    check(&cfg, &records)
}

fn slope(input: PathBuf, column: Column, expect: Option<String>) -> Result<()> {
    let report = slope_of(&read_records(&input)?, column)?;
    println!(
        "slope={:.4} last_ratio={:.4} points={}",
        report.slope, report.last_ratio, report.points
    );
    if let Some(range) = expect {
        let (lo, hi) = range
            .split_once(':')
            .and_then(|(a, b)| Some((a.parse::<f64>().ok()?, b.parse::<f64>().ok()?)))
            .ok_or_else(|| CliError::Config(format!("expect must be lo:hi, got `{range}`")))?;
        if !(lo..=hi).contains(&report.slope) {
            return Err(CliError::Verify(format!("slope {:.4} outside [{lo}, {hi}]", report.slope)));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => run_mode(Mode::Solve, a),
        Command::Verify(a) => run_mode(Mode::Verify, a),
        Command::Bench(a) => run_mode(Mode::Bench, a),
        Command::Slope { input, column, expect } => slope(input, column, expect),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("helmfft: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
