use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use velplan::cli::{self, RunOptions};

/// Minimum-time speed planning along a fixed path.
#[derive(Debug, Parser)]
#[command(name = "velplan", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan a problem file (or a preset) and write profile.csv and verdict.toml.
    ///
    /// Exit status: 0 feasible, 2 infeasible, 1 input error.
    Plan {
        /// Problem file (TOML).
        file: Option<PathBuf>,
        /// Output directory, created if missing.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Number of grid intervals (overrides the file).
        #[arg(long)]
        n: Option<usize>,
        /// Relative feasibility tolerance (overrides the file).
        #[arg(long)]
        eps_feas: Option<f64>,
        /// Use a built-in problem: example1, example2 or example3.
        #[arg(long)]
        preset: Option<String>,
        /// Also write operators.csv and optimal.csv.
        #[arg(long)]
        emit_plots: bool,
    },
    /// Print a built-in problem as a problem file.
    Preset { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Plan {
            file,
            out,
            n,
            eps_feas,
            preset,
            emit_plots,
        } => {
            let opts = RunOptions {
                problem: file,
                preset,
                out,
                n,
                eps_feas,
                emit_plots,
            };
            let outcome = cli::run(&opts);
            match &outcome {
                Ok(bundle) => println!("{}", bundle.summary()),
                Err(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(cli::exit_code(&outcome) as u8)
        }
        Command::Preset { name } => match cli::preset(&name).and_then(|p| p.to_toml_string()) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}
