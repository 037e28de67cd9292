use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sddm_cli::commands::{cmd_boundcheck, cmd_compare, cmd_run, Overrides};
use sddm_core::simulator::Controller;

/// Directional-metric reference-governor simulator.
///
/// Exit codes: 0 success, 1 internal or I/O error, 2 input error, 3 collision,
/// 4 timeout, 5 infeasible projected goal, 6 bound violation.
#[derive(Parser)]
#[command(name = "sddm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ControllerArg {
    Sddm,
    Euclid,
}

impl From<ControllerArg> for Controller {
    fn from(c: ControllerArg) -> Self {
        match c {
            ControllerArg::Sddm => Controller::Sddm,
            ControllerArg::Euclid => Controller::EuclideanEnergy,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write trajectory.csv, report.txt and plot.svg.
    Run {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Integration step in seconds.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, value_enum)]
        controller: Option<ControllerArg>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run both controllers on one scenario and compare them.
    Compare {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check sampled peak <= eta <= delta on random double-integrator cases.
    Boundcheck {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = match cli.command {
        Command::Run { file, out, dt, controller, seed } => {
            cmd_run(&file, &out, Overrides { dt, controller: controller.map(Into::into), seed })
        }
        Command::Compare { file, out, seed } => cmd_compare(&file, &out, seed),
        Command::Boundcheck { count, seed, out } => cmd_boundcheck(count, seed, &out),
    };
    ExitCode::from(code)
}
