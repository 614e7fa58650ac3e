//! `tmirror`: batch driver for the toric-mirror toolkit.
//!
//! Exit codes: 0 success, 2 validation failure, 3 unreadable or malformed input.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Outcome, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Smoothing,
    #[value(name = "central_fiber", alias = "central-fiber")]
    CentralFiber,
}

#[derive(Parser, Debug)]
#[command(name = "tmirror", version, about = "Lattice polytopes, hybrid LG models and mirror checks")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Search bound for the multipliers of F_Γ.
    #[arg(long, default_value_t = 4, global = true)]
    bound: i64,
    /// Largest polytope rank accepted by fan refinement.
    #[arg(long, default_value_t = 3, global = true)]
    rank_limit: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Polar dual, reflexivity, lattice points, faces and smoothness.
    Polytope {
        #[arg(value_enum)]
        action: PolytopeAction,
        file: PathBuf,
    },
    /// Semi-stable partitions and the fibration fans they induce.
    Partition {
        #[arg(value_enum)]
        action: PartitionAction,
        file: PathBuf,
    },
    /// Givental-type models and their compactified fibers.
    Lg {
        #[arg(value_enum)]
        action: LgAction,
        file: PathBuf,
        /// Constraint and potential counts, as `k:r`.
        #[arg(long)]
        split: Option<String>,
        /// Comma-separated names for the potential parameters.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Euler-characteristic checks.
    Euler {
        #[command(subcommand)]
        action: EulerAction,
    },
    /// Spectral-sequence pages and mirror comparisons.
    Ss {
        #[arg(value_enum)]
        action: SsAction,
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "smoothing")]
        mode: Mode,
        /// Label `a` for the cubical comparison.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        label: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolytopeAction {
    Dual,
    Reflexive,
    Points,
    Faces,
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartitionAction {
    Validate,
    DualComplex,
    Lift,
    Frame,
    Fans,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LgAction {
    Emit,
    Compactify,
}

#[derive(Subcommand, Debug)]
enum EulerAction {
    /// Compare degeneration and hybrid strata data.
    Check { deg: PathBuf, hyb: PathBuf },
    /// Chart intersections of the polydisk cover of ℙᴺ.
    Charts { n: usize },
    /// Monodromy relation check.
    Monodromy { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SsAction {
    Weight,
    Monodromy,
    Gflag,
    Delta,
    Pw,
    Pd,
    Cubical,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct WorkspaceConfig {
    pub bound: i64,
    pub rank_limit: usize,
    pub format: Format,
    pub inputs: Vec<PathBuf>,
}

impl WorkspaceConfig {
    fn validate(&self) -> Result<(), String> {
        if self.bound <= 0 {
            return Err(format!("--bound must be positive, got {}", self.bound));
        }
        if self.rank_limit == 0 || self.rank_limit > 3 {
            return Err(format!("--rank-limit must lie in 1..=3, got {}", self.rank_limit));
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Outcome {
    let inputs = match &cli.command {
        Command::Polytope { file, .. } | Command::Partition { file, .. } | Command::Lg { file, .. } => vec![file.clone()],
        Command::Euler { action: EulerAction::Check { deg, hyb } } => vec![deg.clone(), hyb.clone()],
        Command::Euler { action: EulerAction::Monodromy { file } } => vec![file.clone()],
        Command::Euler { action: EulerAction::Charts { .. } } => Vec::new(),
        Command::Ss { files, .. } => files.clone(),
    };
    let cfg = WorkspaceConfig { bound: cli.bound, rank_limit: cli.rank_limit, format: cli.format, inputs };
    if let Err(e) = cfg.validate() {
        return Outcome::Invalid(e);
    }
    match cli.command {
        Command::Polytope { action, .. } => commands::polytope(&cfg, action),
        Command::Partition { action, .. } => commands::partition(&cfg, action),
        Command::Lg { action, split, lambda, .. } => commands::lg(&cfg, action, split.as_deref(), lambda.as_deref()),
        Command::Euler { action: EulerAction::Check { .. } } => commands::euler_check(&cfg),
        Command::Euler { action: EulerAction::Charts { n } } => commands::euler_charts(n),
        Command::Euler { action: EulerAction::Monodromy { .. } } => commands::euler_monodromy(&cfg),
        Command::Ss { action, mode, label, .. } => commands::ss(&cfg, action, mode, label),
    }
}

fn emit(report: &Report, format: Format) {
    let mut out = std::io::stdout().lock();
    // A closed pipe downstream is not an error worth reporting.
    let _ = match format {
        Format::Text => out.write_all(report.text.as_bytes()),
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("report serializes")),
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Outcome::Done(r) => {
            emit(&r, format);
            ExitCode::from(if r.ok { 0 } else { 2 })
        }
        Outcome::Invalid(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Outcome::Malformed(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
