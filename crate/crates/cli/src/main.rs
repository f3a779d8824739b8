use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use jc_cli::commands::{self, GridSpec};
use jc_cli::{CliError, Context, Scenario};

/// Dissipative Jaynes-Cummings simulator.
///
/// Exit codes: 0 success, 2 configuration error, 3 runtime abort.
#[derive(Parser)]
#[command(name = "jc-dissipator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (TOML). `compare` takes it twice.
    #[arg(long, global = true)]
    config: Vec<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reserved. The dynamics are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario; write the trajectory CSV and a JSON summary.
    Simulate,
    /// Distance between the generators of two scenarios, as JSON.
    Compare,
    /// Evaluate metrics along the scenario's `[sweep]` axis.
    Sweep,
    /// Thermal occupation-difference surface as CSV.
    Fig1(Fig1Args),
    /// Kossakowski matrix of a scenario's generator, as JSON.
    LindbladCheck {
        /// Also scan Ohmic baths for negative Kossakowski eigenvalues.
        #[arg(long)]
        search: bool,
    },
}

#[derive(clap::Args)]
struct Fig1Args {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Temperatures in units of omega.
    #[arg(long, default_value_t = 0.01)]
    t_min: f64,
    #[arg(long, default_value_t = 0.5)]
    t_max: f64,
    #[arg(long, default_value_t = 50)]
    t_count: usize,
    /// Frequency offsets in units of omega.
    #[arg(long, default_value_t = 0.0)]
    dw_min: f64,
    #[arg(long, default_value_t = 0.5)]
    dw_max: f64,
    #[arg(long, default_value_t = 51)]
    dw_count: usize,
}

fn one_config(cli: &Cli) -> Result<Scenario, CliError> {
    match cli.config.as_slice() {
        [path] => Scenario::load(path),
        [] => Err(CliError::config("--config PATH is required")),
        _ => Err(CliError::config("expected a single --config")),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Context {
        out: cli.out.clone(),
        verbose: cli.verbose,
    };
    if cli.seed.is_some() {
        ctx.log("note: --seed has no effect; runs are deterministic");
    }
    match &cli.command {
        Command::Simulate => {
            let out = commands::simulate(&one_config(&cli)?, &ctx)?;
            println!("{}", out.trajectory_csv.display());
            println!("{}", out.summary_json.display());
        }
        Command::Compare => {
            let [a, b] = cli.config.as_slice() else {
                return Err(CliError::config("compare needs exactly two --config files"));
            };
            let report = commands::compare(&Scenario::load(a)?, &Scenario::load(b)?, &ctx)?;
            commands::print_json(&report);
        }
        Command::Sweep => {
            let path = commands::sweep(&one_config(&cli)?, &ctx)?;
            println!("{}", path.display());
        }
        Command::Fig1(a) => {
            let grid = GridSpec {
                omega: a.omega,
                t_min: a.t_min,
                t_max: a.t_max,
                t_count: a.t_count,
                dw_min: a.dw_min,
                dw_max: a.dw_max,
                dw_count: a.dw_count,
            };
            let path = commands::fig1(&grid, &ctx)?;
            println!("{}", path.display());
        }
        Command::LindbladCheck { search } => {
            let scenario = match cli.config.len() {
                0 => None,
                _ => Some(one_config(&cli)?),
            };
            let out = commands::lindblad_check(scenario.as_ref(), *search, &ctx)?;
            commands::print_json(&out);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = if e.exit_code() == 2 { "config error" } else { "runtime error" };
            eprintln!("jc-dissipator: {kind}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
