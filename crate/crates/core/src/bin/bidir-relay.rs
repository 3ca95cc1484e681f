use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use bidir_relay::experiment::{run, Format, Scenario, ScenarioConfig};
use bidir_relay::Error;

#[derive(Parser)]
#[command(name = "bidir-relay", version, about = "Rate regions and schedules for two-way multi-relay channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regions on the two-relay example network, with single-relay baselines.
    Regions(Common),
    /// Regions and sum rates for relays evenly spaced on a line.
    Line(Common),
    /// Best sum rate against the number of relays.
    RelayCount(Common),
    /// Sum rate over the positions of two relays on a line.
    TwoRelayGrid(Common),
    /// Chain schedule transcript and phase-count check.
    Schedule(Common),
    /// Low/high-SNR closed forms, pre-logs and gap reports.
    Asymptotics(Common),
}

#[derive(Args)]
struct Common {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Convex-hull post-processing of frontiers.
    #[arg(long)]
    hull: bool,
    /// Grid search over the relay broadcast power split.
    #[arg(long)]
    power_grid: bool,
    /// Number of weights in the frontier sweep.
    #[arg(long)]
    lambda_steps: Option<usize>,
}

fn execute(scenario: Scenario, c: Common) -> Result<Vec<PathBuf>, Error> {
    let mut cfg = match &c.config {
        Some(path) => ScenarioConfig::load(path, Some(scenario))?,
        None => ScenarioConfig::defaults(scenario),
    };
    cfg.hull |= c.hull;
    cfg.power_grid |= c.power_grid;
    if let Some(n) = c.lambda_steps {
        cfg.lambda_steps = n;
    }
    let format: Format = c.format.parse()?;
    run(&cfg)?.write(&c.out, format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (scenario, common) = match cli.command {
        Command::Regions(c) => (Scenario::Regions, c),
        Command::Line(c) => (Scenario::Line, c),
        Command::RelayCount(c) => (Scenario::RelayCount, c),
        Command::TwoRelayGrid(c) => (Scenario::TwoRelayGrid, c),
        Command::Schedule(c) => (Scenario::Schedule, c),
        Command::Asymptotics(c) => (Scenario::Asymptotics, c),
    };
    match execute(scenario, common) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string(), "scenario": scenario.name() }));
            ExitCode::FAILURE
        }
    }
}
