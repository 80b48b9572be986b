//! `opcalc`: growth sweeps for the counterexample family, randomized checks
//! of the finite-rank upper bounds, and the invariant self-check.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use opcalc::counterexample::{EpsilonRule, EtaEvaluation};

use crate::commands::Verdict;
use crate::config::{Settings, OUT_DIR_ENV};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "opcalc",
    version,
    about = "Operator-calculus experiments for non-commuting triples"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep N and p over the counterexample family; exit 1 unless every ratio is √N.
    Growth {
        #[command(flatten)]
        common: Common,
        /// Scale C by the constant ε ∈ (0, 1].
        #[arg(long, conflicts_with = "epsilon_power")]
        epsilon: Option<f64>,
        /// Scale C by ε = N^(−a).
        #[arg(long, value_name = "a")]
        epsilon_power: Option<f64>,
    },
    /// Randomized checks of the rank-dependent bounds for pairs and triples.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Run every invariant check and print one line per item.
    Selfcheck {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated sizes N.
    #[arg(long = "N", value_name = "LIST")]
    n: Option<String>,
    /// Comma-separated Schatten indices, `inf` for p = ∞.
    #[arg(long, value_name = "LIST")]
    p: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Half-width L of the sampling grid for ψ.
    #[arg(long = "grid-L", value_name = "L")]
    grid_l: Option<String>,
    /// log2 of the number of grid samples, in [10, 22].
    #[arg(long)]
    grid_m: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output path, `-` for standard output. Defaults to $OPCALC_OUT_DIR/<command>.<ext>
    /// when that variable is set.
    #[arg(long)]
    out: Option<String>,
    /// Random trials per (N, p) cell.
    #[arg(long)]
    trials: Option<String>,
    /// Treat grid-resolution warnings as failures.
    #[arg(long)]
    strict: bool,
    #[arg(long, hide = true, value_enum)]
    inject_fault: Option<Fault>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Fault {
    /// η evaluated as 2(1 − cos x)/x² without the Taylor branch.
    EtaDirect,
}

impl Common {
    fn settings(&self) -> Result<Settings, CliError> {
        let file = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let flags = Settings {
            n: self.n.clone(),
            p: self.p.clone(),
            seed: self.seed.clone(),
            grid_l: self.grid_l.clone(),
            grid_m: self.grid_m.clone(),
            format: self.format.clone(),
            out: self.out.clone(),
            trials: self.trials.clone(),
            strict: self.strict.then(|| "true".to_string()),
        };
        Ok(file.overlay(flags))
    }

    fn eta(&self) -> EtaEvaluation {
        match self.inject_fault {
            Some(Fault::EtaDirect) => EtaEvaluation::Direct,
            None => EtaEvaluation::TaylorGuarded,
        }
    }
}

const GROWTH_N: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
const BOUNDS_N: [usize; 3] = [2, 3, 4];

fn run(cli: Cli) -> Result<Verdict, CliError> {
    let out_dir = std::env::var(OUT_DIR_ENV).ok();
    match cli.command {
        Command::Growth {
            common,
            epsilon,
            epsilon_power,
        } => {
            let cfg = common
                .settings()?
                .resolve(&GROWTH_N, "growth", out_dir.as_deref())?;
            let rule = match (epsilon, epsilon_power) {
                (Some(e), _) => Some(EpsilonRule::Constant(e)),
                (None, Some(a)) => Some(EpsilonRule::InversePower(a)),
                (None, None) => None,
            };
            commands::growth(&cfg, rule, common.eta())
        }
        Command::Bounds { common } => {
            let cfg = common
                .settings()?
                .resolve(&BOUNDS_N, "bounds", out_dir.as_deref())?;
            commands::bounds(&cfg)
        }
        Command::Selfcheck { common } => {
            let settings = common.settings()?;
            let n_given = settings.n.is_some();
            let cfg = settings.resolve(&GROWTH_N, "selfcheck", out_dir.as_deref())?;
            commands::selfcheck(&cfg, common.eta(), n_given)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::AssertionFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("opcalc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
