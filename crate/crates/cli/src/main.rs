//! Command-line harness around the optimizer core: `optimize`, `simulate`,
//! `sweep`, and `plot`. Exit codes: 0 success, 2 for configuration,
//! parameter, or schema problems (clap also uses 2 for usage errors), 3 for
//! filesystem failures.

mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Domain errors keep the offending key/line in the message; the two
/// variants carry the exit code distinction and nothing else.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, parameters, or input schema. Exit 2.
    Input(String),
    /// The run was sound but the filesystem was not. Exit 3.
    Fs(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Fs(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Fs(m) => f.write_str(m),
        }
    }
}

#[derive(Parser)]
#[command(name = "fuzzy-pendulum", version, about = "Tunes a fuzzy pendulum controller with a hybrid PSO / tabu search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hybrid optimization and write its artifacts to a directory.
    Optimize {
        /// Flat key = value run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (created if missing); falls back to the config's
        /// `out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a saved controller once and print its settling time.
    Simulate {
        /// Controller parameter file.
        #[arg(long)]
        params: PathBuf,
        /// Initial pendulum angle in radians.
        #[arg(long)]
        theta0: f64,
        /// Trace CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate a controller across evenly spaced initial angles.
    Sweep {
        /// Controller parameter file.
        #[arg(long)]
        params: PathBuf,
        /// Smallest initial angle in radians.
        #[arg(long)]
        min: f64,
        /// Largest initial angle in radians.
        #[arg(long)]
        max: f64,
        /// Number of evenly spaced angles, at least 2.
        #[arg(long)]
        steps: usize,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Render columns of a CSV as a static SVG line chart.
    Plot {
        /// Input CSV with a header row.
        #[arg(long = "in")]
        input: PathBuf,
        /// Column for the horizontal axis.
        #[arg(long)]
        x: String,
        /// Comma-separated columns for the vertical axis.
        #[arg(long, value_delimiter = ',')]
        y: Vec<String>,
        /// SVG output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Optimize { config, seed, out } => {
            commands::optimize(&config, seed, out.as_deref())
        }
        Command::Simulate { params, theta0, out } => commands::simulate(&params, theta0, &out),
        Command::Sweep {
            params,
            min,
            max,
            steps,
            out,
        } => commands::sweep(&params, min, max, steps, &out),
        Command::Plot { input, x, y, out } => commands::plot(&input, &x, &y, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Input(_) => ExitCode::from(2),
                CliError::Fs(_) => ExitCode::from(3),
            }
        }
    }
}
