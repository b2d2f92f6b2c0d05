use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use occusense::app::{self, AppError, Artifact, Run};
use occusense::io::preset_dir;
use occusense::relay::PlannerMode;

/// Placement, lifetime and relay planning for PIR occupancy sensing.
#[derive(Parser, Debug)]
#[command(name = "occusense", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory; defaults to the scenario's output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed for the trace suite.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory with extra preset files (fov/NAME.toml, energy/NAME.toml).
    #[arg(long)]
    preset_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the maximum-coverage placement.
    Place {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Sweep the bargaining weight over wake-up periods.
    Game {
        #[command(flatten)]
        common: Common,
        /// Comma-separated weights, each at least 1.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
    },
    /// Choose relay nodes for the sensor-to-sink tree.
    Relay {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        #[arg(long)]
        heuristic: bool,
    },
    /// Replay synthetic occupant traces against a placement.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// placement.json written by `place`; solved afresh when absent.
        #[arg(long)]
        placement: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated timeouts in seconds, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        timeouts: Option<Vec<f64>>,
    },
    /// Run the whole calibrated pipeline.
    Reproduce {
        #[command(flatten)]
        common: Common,
    },
}

fn load(c: &Common) -> Result<Run, AppError> {
    let dir = preset_dir(c.preset_dir.as_deref());
    Run::load(&c.scenario, dir.as_deref(), c.seed)
}

fn finish(c: &Common, run: &Run, artifacts: Vec<Artifact>) -> Result<(), AppError> {
    let out = c.out.clone().unwrap_or_else(|| PathBuf::from(&run.scenario.output.dir));
    app::write_artifacts(&out, &artifacts)?;
    for a in &artifacts {
        println!("{}", out.join(&a.name).display());
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Place { common, k } => {
            let run = load(&common)?;
            let a = app::cmd_place(&run, k)?;
            finish(&common, &run, a)
        }
        Command::Game { common, alpha } => {
            let run = load(&common)?;
            let a = app::cmd_game(&run, alpha.as_deref())?;
            finish(&common, &run, a)
        }
        Command::Relay { common, exact, heuristic } => {
            let run = load(&common)?;
            let mode = match (exact, heuristic) {
                (true, _) => Some(PlannerMode::Exact),
                (_, true) => Some(PlannerMode::Heuristic),
                _ => None,
            };
            let a = app::cmd_relay(&run, mode)?;
            finish(&common, &run, a)
        }
        Command::Simulate { common, placement, k, timeouts } => {
            let run = load(&common)?;
            let a = app::cmd_simulate(&run, placement.as_deref(), k, timeouts.as_deref())?;
            finish(&common, &run, a)
        }
        Command::Reproduce { common } => {
            let run = load(&common)?;
            let a = app::cmd_reproduce(&run)?;
            finish(&common, &run, a)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("{}", AppError::Usage(first.to_string()).to_json_line());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
