//! `laumon`: fixed-point listings, operator dumps and verification suites.

mod commands;
mod config;
mod output;
mod suites;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::suites::{Suite, SuiteOptions};

/// Bad flags, bad input files or a refused cost estimate. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(String);

impl UsageError {
    pub fn new(msg: impl Into<String>) -> Self {
        UsageError(msg.into())
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Number of colors.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Degree vector such as `1,2` or, for `verify`, a bound on the total degree.
    #[arg(long, global = true)]
    pub degree: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run even when the fixed-point count exceeds the cost limit.
    #[arg(long, global = true)]
    pub force: bool,
    /// TOML file with defaults for any of the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "laumon", version, about = "Exact K-theoretic computations on affine Laumon spaces")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the fixed points of a degree with their box weights.
    FixedPoints,
    /// Tangent characters at fixed points.
    Tangent {
        /// A single fixed point such as `(2,1|1)`; defaults to every point of `--degree`.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Matrix of a root generator on the fixed-point basis.
    ActionMatrix {
        /// The interval `i,j` of the generator.
        #[arg(long)]
        interval: String,
        /// Dump the lowering generator `f` instead of `e`.
        #[arg(long)]
        lowering: bool,
    },
    /// Gram matrix of the PBW basis.
    Gram,
    /// Restriction tables of the dual PBW basis.
    DualPbw,
    /// Run a verification suite over all degrees up to `--degree`.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Extra stable-envelope candidates (JSON) for the `stab` suite.
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Random representations for the `cells` suite.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Largest `k` in the `(1 - p^{2k})` factors allowed by `denominators`.
        #[arg(long, default_value_t = 4)]
        max_k: u32,
        /// Multiplicity of each factor allowed by `denominators`.
        #[arg(long, default_value_t = 2)]
        max_mult: u32,
    },
    /// Check stable-envelope candidates from a JSON file.
    StabCheck { file: PathBuf },
    /// Solve a degree-constrained lifting problem from a JSON file.
    LiftSolve { file: PathBuf },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = RunConfig::resolve(&cli.global)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
    }
    let (out, passed) = match cli.command {
        Command::FixedPoints => (commands::fixed_points(&cfg)?, true),
        Command::Tangent { lambda } => (commands::tangent(&cfg, lambda.as_deref())?, true),
        Command::ActionMatrix { interval, lowering } => (commands::action_matrix(&cfg, &interval, lowering)?, true),
        Command::Gram => (commands::gram(&cfg)?, true),
        Command::DualPbw => (commands::dual_pbw(&cfg)?, true),
        Command::Verify { suite, candidates, samples, max_k, max_mult } => {
            let opts = SuiteOptions { candidates, samples, big_k: max_k, big_m: max_mult };
            suites::run(suite, &cfg, &opts)?
        }
        Command::StabCheck { file } => commands::stab_check(&cfg, &file)?,
        Command::LiftSolve { file } => commands::lift_solve(&file)?,
    };
    out.write(cfg.format, cfg.out.as_deref())?;
    Ok(passed)
}

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| c.is::<UsageError>() || c.is::<std::io::Error>())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}
