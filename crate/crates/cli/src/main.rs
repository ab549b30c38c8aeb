//! `clockconv`: run scenarios, sweep conventions and convert time scales.
//!
//! Exit status is 0 on success, 1 for invalid input (bad flags, malformed
//! scenarios, out-of-range parameters) and 2 for failures while running
//! valid input.

mod bundled;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clockconv::ErrorKind;

#[derive(Debug, Parser)]
#[command(
    name = "clockconv",
    version,
    about = "Clock synchronization conventions, simulated"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write its trace, sync estimates and reports.
    Simulate(SimulateArgs),
    /// Re-read one run under a grid of conventions and frames.
    Sweep(SweepArgs),
    /// Convert a date-time between TAI and UTC.
    Convert(ConvertArgs),
    /// Local-hidden-variable bound and singlet optimum of the CHSH expression.
    Chsh(ChshArgs),
    /// Relativistic clock-rate offsets (GPS preset by default).
    Rates(RatesArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario file, or the name of a bundled scenario.
    #[arg(long)]
    scenario: String,
    /// Output directory; must not exist or be empty.
    #[arg(long)]
    out: PathBuf,
    /// Replaces the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated ε values replacing the scenario's conventions.
    #[arg(long, value_delimiter = ',')]
    epsilon_grid: Option<Vec<f64>>,
    /// Comma-separated frame velocities (fractions of c).
    #[arg(long, value_delimiter = ',')]
    boost_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    /// Leap table CSV for the smear analysis.
    #[arg(long)]
    leap_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ScenarioArgs,
    /// Comma-separated κ values, each swept as ε = (1 − κ)/2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    kappa_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Tai,
    Utc,
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// `YYYY-MM-DDTHH:MM:SS[.fffffffff]`
    time: String,
    #[arg(long, value_enum)]
    from: Scale,
    #[arg(long, value_enum)]
    to: Scale,
    /// Leap table CSV; the bundled 1972–2017 table by default.
    #[arg(long)]
    leap_table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ChshArgs {
    /// Angle grid steps per setting.
    #[arg(long)]
    steps: Option<usize>,
    /// Takes `grid_steps` from the scenario's `[chsh]` section.
    #[arg(long)]
    scenario: Option<String>,
}

#[derive(Debug, Args)]
struct RatesArgs {
    /// Clock speed in m/s; requires --potential-delta.
    #[arg(long, requires = "potential_delta")]
    velocity: Option<f64>,
    /// Potential difference to the reference clock in m²/s².
    #[arg(long, requires = "velocity", allow_hyphen_values = true)]
    potential_delta: Option<f64>,
    /// Takes the rates from the scenario's `[rates]` section.
    #[arg(long, conflicts_with = "velocity")]
    scenario: Option<String>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<clockconv::Error>() {
        Some(e) if e.kind() == ErrorKind::Runtime => 2,
        Some(_) => 1,
        None if err.downcast_ref::<output::UsageError>().is_some() => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(&a.common.into(), a.leap_table),
        Command::Sweep(a) => {
            let mut manifest: output::RunManifest = a.common.into();
            manifest.kappa_grid = a.kappa_grid;
            commands::sweep(&manifest)
        }
        Command::Convert(a) => commands::convert(&a.time, a.from, a.to, a.leap_table.as_deref()),
        Command::Chsh(a) => commands::chsh(a.steps, a.scenario.as_deref()),
        Command::Rates(a) => commands::rates(a.velocity, a.potential_delta, a.scenario.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("clockconv: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

impl From<ScenarioArgs> for output::RunManifest {
    fn from(a: ScenarioArgs) -> Self {
        output::RunManifest {
            scenario: a.scenario,
            out: a.out,
            analyses: Vec::new(),
            epsilon_grid: a.epsilon_grid,
            kappa_grid: None,
            boost_grid: a.boost_grid,
            seed: a.seed,
        }
    }
}
