use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use overlap_cli::commands::{
    cmd_reproduce, cmd_simulate, cmd_test, default_workers, ReproduceOptions, SimulateOverrides,
};
use overlap_cli::config::{DEFAULT_REPS, DEFAULT_SEED};
use overlap_cli::{exit, OutputFormat, Table};

/// Partially overlapping samples t-tests.
///
/// Exit codes: 0 success, 2 degenerate statistical input, 3 unreadable
/// data, bad config or bad arguments.
#[derive(Parser)]
#[command(name = "overlap-t", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the test on a CSV file with columns x1,x2.
    Test {
        file: PathBuf,
        /// Hypothesized difference mu1 - mu2.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        /// Pooled-variance statistic instead of the Welch-type one.
        #[arg(long)]
        var_equal: bool,
        /// With a single pair, drop it and compare the remaining independent
        /// observations instead of failing.
        #[arg(long)]
        discard_single_pair: bool,
    },
    /// Run a simulation grid described by a JSON config.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Rerun one of the published Type I error tables.
    Reproduce {
        #[arg(value_enum)]
        table: Table,
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Diff against the printed values.
        #[arg(long)]
        compare: bool,
        #[arg(long)]
        workers: Option<usize>,
        /// Replicates per cell for the table4 Overall row (0 skips it);
        /// defaults to --reps.
        #[arg(long)]
        overall_reps: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::PARSE } else { exit::OK };
            return ExitCode::from(code as u8);
        }
    };

    let result = match cli.command {
        Command::Test {
            file,
            mu,
            var_equal,
            discard_single_pair,
        } => cmd_test(&file, mu, var_equal, discard_single_pair).map(|s| print!("{s}")),
        Command::Simulate {
            config,
            out,
            format,
            workers,
        } => cmd_simulate(&config, &SimulateOverrides { out, format, workers }),
        Command::Reproduce {
            table,
            reps,
            seed,
            compare,
            workers,
            overall_reps,
        } => {
            let opts = ReproduceOptions {
                reps,
                seed,
                workers: workers.unwrap_or_else(default_workers),
                compare,
                overall_reps: overall_reps.unwrap_or(reps),
            };
            cmd_reproduce(table, &opts).map(|s| print!("{s}"))
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
