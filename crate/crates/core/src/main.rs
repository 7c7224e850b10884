use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod cli;

#[derive(Parser)]
#[command(
    name = "canetoad",
    version,
    about = "Cane-toads equation lab: spectra, simulations, fronts and action"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output.directory`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Write SVG plots.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// γ∞, the ground state Q, the dispersion curve and c*.
    Spectrum(Common),
    /// Integrate the equation; write ρ profiles, fronts, monitors and snapshots.
    Simulate(Common),
    /// Simulate and fit front speed and exponents.
    Fronts(Common),
    /// Action minimization on a (t, x) grid and the rectangular-path budget.
    Action(Common),
    /// All of the above with a pass/fail table.
    Report(Common),
    /// Reports for several configs on a job pool.
    Sweep {
        /// Config files or directories of `*.toml` files.
        #[arg(long = "config", short, required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        plots: bool,
        #[arg(long, short, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match cli.command {
        Command::Spectrum(c) => cli::single(&c.config, c.out, c.plots, cli::Task::Spectrum),
        Command::Simulate(c) => cli::single(&c.config, c.out, c.plots, cli::Task::Simulate),
        Command::Fronts(c) => cli::single(&c.config, c.out, c.plots, cli::Task::Fronts),
        Command::Action(c) => cli::single(&c.config, c.out, c.plots, cli::Task::Action),
        Command::Report(c) => cli::single(&c.config, c.out, c.plots, cli::Task::Report),
        Command::Sweep {
            configs,
            out,
            plots,
            jobs,
        } => cli::sweep(&configs, &out, plots, jobs),
    };
    ExitCode::from(status.code())
}
