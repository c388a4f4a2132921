//! The `euclidlab` command line: one engine run per invocation, one JSON
//! report on the way out.

pub mod args;
mod commands;
mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

pub use commands::{
    ClosureParams, Example13Params, Example14Params, Lemma8Params, NegativeExampleParams,
    PillaiParams, ScanParams, Theorem1Params, WitnessParams, ZsigmondyParams,
};
pub use report::{digest, Report, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CONFIG: i32 = 64;

/// Environment variable that replaces the built-in default budgets.
pub const BUDGET_ENV: &str = "EUCLIDLAB_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "euclidlab",
    version,
    about = "Outside-prime witnesses, closure and diophantine checks"
)]
pub struct Cli {
    /// Where to write the report; `-` is standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,

    /// Worker threads (default: available processors).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file with the subcommand's parameters; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Log to standard error; repeat for more detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search both constant signs over P_1 + P_{n-2} + P_{n-1}.
    #[command(name = "check-theorem1")]
    CheckTheorem1(Theorem1Params),
    /// Exhaustive relaxation scan over many instances.
    #[command(name = "scan")]
    Scan(ScanParams),
    /// Grow a prime-power set until a prime bound is covered.
    #[command(name = "closure")]
    Closure(ClosureParams),
    /// Primitive prime divisors of a^n - b^n.
    #[command(name = "zsigmondy")]
    Zsigmondy(ZsigmondyParams),
    /// Bounded catalog of q^x - 1 = p^y (q^z - 1) with p | q + 1.
    #[command(name = "lemma8")]
    Lemma8(Lemma8Params),
    /// Bounded catalog of A (a^x1 - a^x2) = B (b^y1 - b^y2).
    #[command(name = "pillai")]
    Pillai(PillaiParams),
    /// Powers p^(nk) avoiding a set of odd primes.
    #[command(name = "example13")]
    Example13(Example13Params),
    /// Powers of a common primitive root.
    #[command(name = "example14")]
    Example14(Example14Params),
    /// Witness search on one instance.
    #[command(name = "witness")]
    Witness(WitnessParams),
    /// Extend seed primes so that no witness remains.
    #[command(name = "negative-example")]
    NegativeExample(NegativeExampleParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckTheorem1(_) => "check-theorem1",
            Command::Scan(_) => "scan",
            Command::Closure(_) => "closure",
            Command::Zsigmondy(_) => "zsigmondy",
            Command::Lemma8(_) => "lemma8",
            Command::Pillai(_) => "pillai",
            Command::Example13(_) => "example13",
            Command::Example14(_) => "example14",
            Command::Witness(_) => "witness",
            Command::NegativeExample(_) => "negative-example",
        }
    }
}

/// A failed run that produced no report.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<euclidlab_core::Error> for Failure {
    fn from(e: euclidlab_core::Error) -> Self {
        use euclidlab_core::Error as E;
        let code = match &e {
            E::Domain(_) | E::InvalidInstance(_) | E::Json(_) => EXIT_CONFIG,
            E::Budget { .. } => EXIT_BUDGET,
            E::TheoremViolation { .. } | E::LemmaViolation { .. } => EXIT_VIOLATION,
            E::Invariant(_) | E::NotFound(_) => EXIT_OTHER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// A finished run: the report and the exit code it maps to.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
}

fn load_config<P: DeserializeOwned + Default>(path: Option<&Path>) -> Result<P, Failure> {
    let Some(path) = path else {
        return Ok(P::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::config(format!("config {}: {e}", path.display())))
}

/// Budget used when neither a flag nor the config file sets one.
pub(crate) fn default_budget(built_in: u64) -> Result<u64, Failure> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::config(format!(
                "{BUDGET_ENV}: expected a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(built_in),
    }
}

/// Merges the config file into the flags, runs the engine and builds the
/// report. Writing it out is left to the caller.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let config = cli.config.as_deref();
    let started = std::time::Instant::now();
    let (echo, result, code) = match &cli.command {
        Command::CheckTheorem1(p) => commands::theorem1(p.clone().merge(load_config(config)?))?,
        Command::Scan(p) => commands::scan(p.clone().merge(load_config(config)?))?,
        Command::Closure(p) => commands::closure(p.clone().merge(load_config(config)?))?,
        Command::Zsigmondy(p) => commands::zsigmondy(p.clone().merge(load_config(config)?))?,
        Command::Lemma8(p) => commands::lemma8(p.clone().merge(load_config(config)?))?,
        Command::Pillai(p) => commands::pillai(p.clone().merge(load_config(config)?))?,
        Command::Example13(p) => commands::example13(p.clone().merge(load_config(config)?))?,
        Command::Example14(p) => commands::example14(p.clone().merge(load_config(config)?))?,
        Command::Witness(p) => commands::witness(p.clone().merge(load_config(config)?))?,
        Command::NegativeExample(p) => {
            commands::negative_example(p.clone().merge(load_config(config)?))?
        }
    };
    let report = Report::new(cli.command.name(), echo, result, started.elapsed());
    Ok(Outcome { report, code })
}

/// Runs inside a rayon pool of the requested size.
pub fn run_with_threads(cli: &Cli) -> Result<Outcome, Failure> {
    match cli.threads {
        Some(0) => Err(Failure::config("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure {
                code: EXIT_OTHER,
                message: e.to_string(),
            })?
            .install(|| run(cli)),
        None => run(cli),
    }
}
