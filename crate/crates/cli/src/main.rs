//! `svset`: command-line front end for the polytope, fan, scenario-tree and
//! Monte Carlo tooling in `svset-core`.
//!
//! Exit codes: 0 when every verdict passes, 1 when a verdict fails, 2 for
//! usage or input errors.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "svset", version, about = "Set-valued martingale experiments on polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normal fan and type cone of a planar polytope.
    Fan(FanArgs),
    /// Exact audits on a scenario tree.
    Tree(TreeArgs),
    /// Random-triangle Monte Carlo experiment.
    Simulate(SimulateArgs),
    /// Built-in invariant suites.
    Verify(VerifyArgs),
    /// Regenerates the shipped example inputs.
    #[command(hide = true)]
    Corpus(CorpusArgs),
}

#[derive(clap::Args)]
pub struct FanArgs {
    /// Polytope JSON file (`{"dim": 2, "vertices": [[x, y], ...]}`).
    pub input: PathBuf,
    /// Directory for `fan.json` and `report_fan.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance for merging identical type-cone rows.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeMode {
    Audit,
    Equivalence,
    Randomization,
}

#[derive(clap::Args)]
pub struct TreeArgs {
    /// Tree JSON file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "audit")]
    pub mode: TreeMode,
    /// Direction grid size.
    #[arg(long, default_value_t = 720)]
    pub grid_k: usize,
    /// Largest Hausdorff gap still counted as equality.
    #[arg(long, default_value_t = svset_core::tree::GAP_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Walk,
    Gauss,
}

#[derive(clap::Args)]
pub struct SimulateArgs {
    /// Experiment config JSON; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub grid_k: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Keep every n-th grid point in trajectory files (1 = full resolution).
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long, default_value = "svset-out")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Geometry,
    Fan,
    Tree,
    Mc,
    All,
}

#[derive(clap::Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Monte Carlo sample count for the `mc` suite.
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SVSET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("SVSET_THREADS=`{raw}` is not a count"))?;
    if n == 0 {
        bail!("SVSET_THREADS must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Fan(a) => commands::fan::run(&a),
        Command::Tree(a) => commands::tree::run(&a),
        Command::Simulate(a) => commands::simulate::run(&a),
        Command::Verify(a) => commands::verify::run(&a),
        Command::Corpus(a) => commands::corpus::run(&a).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
