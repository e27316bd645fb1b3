use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stroblim::commands::{self, RunOptions};
use stroblim::{CliError, Outcome};

#[derive(Parser)]
#[command(
    name = "stroblim",
    version,
    about = "Repeated probe measurements: exact runs and stroboscopic limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON)
    scenario: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Subsample the time grid to about this many points
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write one CSV per method plus a combined CSV
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Compare methods against the first one and report a verdict
    Compare {
        #[command(flatten)]
        common: Common,
        /// Override the scenario's max_deviation
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Deviation at fixed omega for several tau values
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated tau values
        #[arg(long, value_delimiter = ',', required = true)]
        tau: Vec<f64>,
    },
    /// Render a trajectory CSV as SVG
    Plot { csv: PathBuf, svg: PathBuf },
}

fn options(common: &Common, tolerance: Option<f64>) -> RunOptions {
    RunOptions {
        out_dir: common.out_dir.clone(),
        grid_points: common.grid_points,
        tolerance,
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Run { common } => {
            for file in commands::run(&common.scenario, &options(&common, None))? {
                println!("{}", file.display());
            }
            Ok(Outcome::Ok)
        }
        Command::Compare { common, tolerance } => {
            let (outcome, summary) =
                commands::compare(&common.scenario, &options(&common, tolerance))?;
            print!("{summary}");
            Ok(outcome)
        }
        Command::Sweep { common, tau } => {
            let (outcome, summary) =
                commands::sweep(&common.scenario, &tau, &options(&common, None))?;
            print!("{summary}");
            Ok(outcome)
        }
        Command::Plot { csv, svg } => {
            commands::plot(&csv, &svg)?;
            println!("{}", svg.display());
            Ok(Outcome::Ok)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
