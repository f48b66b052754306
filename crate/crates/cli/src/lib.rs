//! Command-line front end: problem files in, fan documents and CSV profiles out.
//!
//! ```text
//! rough-riemann solve    --spec problem.json --out results/
//! rough-riemann simulate --spec cauchy.json  --out results/
//! rough-riemann compare  --spec problem.json --out results/
//! rough-riemann validate --spec problem.json --out results/ --seed 7
//! ```
//!
//! Exit status is 0 on success, 2 for bad input and 3 when a solver or an
//! invariant check fails.

pub mod artifacts;
pub mod commands;
pub mod document;
pub mod error;
pub mod spec;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{Options, Written};
pub use document::{FanDocument, WaveRecord};
pub use error::CliError;
pub use spec::ProblemSpec;

#[derive(Debug, Parser)]
#[command(
    name = "rough-riemann",
    version,
    about = "Riemann solvers for polymer flooding and traffic on rough media"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a Riemann problem and write the wave fan.
    Solve(CommonArgs),
    /// Run a Cauchy problem by front tracking or vanishing viscosity.
    Simulate(CommonArgs),
    /// Measure the L1 distance to the viscous reference solution.
    Compare(CommonArgs),
    /// Run the invariant suite; with a seed, also on random problems.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Problem file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Tolerance of the invariant suite.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Seed of the random problem sweep.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random problems drawn by `validate --seed`.
    #[arg(long, default_value_t = commands::DEFAULT_SWEEP)]
    pub count: usize,
}

impl CommonArgs {
    fn options(&self) -> Result<Options, CliError> {
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Input("--tol must be positive".into()));
            }
        }
        Ok(Options {
            out: self.out.clone(),
            tol: self.tol,
            seed: self.seed,
            count: self.count,
        })
    }
}

type Verb = fn(&ProblemSpec, &Options) -> Result<Written, CliError>;

/// Runs one verb and returns the files it wrote.
pub fn run(cli: &Cli) -> Result<Written, CliError> {
    let (args, verb): (&CommonArgs, Verb) = match &cli.command {
        Command::Solve(a) => (a, commands::solve),
        Command::Simulate(a) => (a, commands::simulate),
        Command::Compare(a) => (a, commands::compare),
        Command::Validate(a) => (a, commands::validate),
    };
    let opts = args.options()?;
    let spec = spec::load(&args.spec)?;
    verb(&spec, &opts)
}
