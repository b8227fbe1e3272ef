//! `ergo`: exact checks, decay curves and Monte Carlo for positive-rate
//! probabilistic cellular automata and interacting particle systems.
//!
//! Exit codes: 0 success, 1 usage/parse/file error, 2 rule not strictly
//! positive, 3 a checked identity or inequality failed, 4 state cap exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergo_core::Error;

#[derive(Parser, Debug)]
#[command(name = "ergo", version, about = "Ergodicity toolkit for PCA and IPS with positive rates")]
struct Cli {
    /// Worker threads for replica-parallel commands (results do not depend on it).
    #[arg(long, global = true, value_name = "R")]
    parallel: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    /// `w0 xor w1` with probability 1-eps on N = (0,1)
    XorNoise,
    /// xor with noise that always writes 1 (not Bernoulli-stationary)
    BiasedXor,
    /// copy right / copy flipped left / keep, on N = (-1,0,1)
    #[value(alias = "ex-6-5")]
    CopyFlip,
    /// copy right / copy left / keep, on N = (-1,0,1)
    CopyPlain,
}

#[derive(Args, Debug, Clone)]
pub struct RuleArgs {
    /// Rule file (JSON).
    #[arg(long)]
    pub rule: PathBuf,
    /// Reference marginal: `uniform` or comma-separated weights such as `9/10,1/10`.
    #[arg(long, default_value = "uniform")]
    pub q: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one of the built-in example rules.
    MakeRule {
        kind: RuleKind,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value = "rational")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print kappa, psi, theta and theta^-1 of the noise decomposition.
    Decompose {
        #[command(flatten)]
        rule: RuleArgs,
        /// Noise level to split off (defaults to the maximal one).
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long, value_enum, default_value = "rational")]
        mode: Mode,
    },
    /// Check that the Bernoulli measure lambda_q is stationary.
    CheckStationary {
        #[command(flatten)]
        rule: RuleArgs,
        /// Largest box diameter checked.
        #[arg(long = "max-diameter", short = 'L', default_value_t = 4)]
        max_diameter: usize,
        /// Continuous-time (IPS) dynamics instead of synchronous updating.
        #[arg(long)]
        ips: bool,
        /// With --ips: require every single-site update to preserve lambda_q.
        #[arg(long, requires = "ips")]
        local: bool,
        #[arg(long, value_enum, default_value = "rational")]
        mode: Mode,
    },
    /// Exact or simulated evolution of a window marginal, as CSV.
    Evolve(commands::EvolveArgs),
    /// Escape probabilities of the infection growth process.
    Influence(commands::InfluenceArgs),
    /// Certify the strong data-processing inequality for a noise matrix.
    Sdpi(commands::SdpiArgs),
    /// Mixing-time bound `(d/2 beta) ln n + (ln alpha - ln eps)/beta`.
    MixingBound(commands::MixingArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotStrictlyPositive => 2,
        Error::CapExceeded { .. } => 4,
        _ => 1,
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
    if let Some(threads) = cli.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::MakeRule { kind, eps, mode, out } => commands::make_rule(kind, &eps, mode, out.as_deref()),
        Command::Decompose { rule, kappa, mode } => commands::decompose(&rule, kappa.as_deref(), mode),
        Command::CheckStationary { rule, max_diameter, ips, local, mode } => {
            commands::check_stationary(&rule, max_diameter, ips, local, mode)
        }
        Command::Evolve(args) => commands::evolve(&args),
        Command::Influence(args) => commands::influence(&args),
        Command::Sdpi(args) => commands::sdpi(&args),
        Command::MixingBound(args) => commands::mixing_bound(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
