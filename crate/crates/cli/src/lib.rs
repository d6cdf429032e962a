//! Library side of the `gr-cup` binary: argument model, basis cache,
//! report emitters and the conjecture sweep.

pub mod cache;
pub mod commands;
pub mod conjecture;
pub mod table;

use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::run;

/// Tag stored in cache entries and emitted in every report.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Values of `n` checked by `verify-all` when no `n` or range is given.
pub const DEFAULT_VERIFY_NS: [u64; 4] = [4, 12, 28, 60];

#[derive(Debug, Parser)]
#[command(name = "gr-cup", version, about = "Cup-length and Gröbner bases for the oriented Grassmannian of 3-planes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// The three generators g_{n+1}, g_{n+2}, g_{n+3} of the ideal
    Generators,
    /// Reduced lex Gröbner basis of the ideal
    Basis,
    /// Cup-length of the image of p^*, height of w2 and related invariants
    Cup,
    /// Stiefel-Whitney non-immersion bound (special n only)
    Immersion,
    /// Sweep over a range of n against the conjectured cup-length
    Table,
    /// Full cross-check at special n (default 4, 12, 28, 60)
    VerifyAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    #[arg(long, global = true)]
    pub n: Option<u64>,
    #[arg(long, global = true)]
    pub from: Option<u64>,
    #[arg(long, global = true)]
    pub to: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Overrides GRCUP_CACHE and the platform cache directory
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs)
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    /// Use the closed-form family instead of Buchberger (special n only)
    #[arg(long, global = true)]
    pub paper_family: bool,
    /// Check the basis and replay reduction chains
    #[arg(long, global = true)]
    pub verify: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cache: {0}")]
    Cache(#[from] cache::CacheError),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Cache(_) => 4,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

macro_rules! compute_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.to_string())
            }
        }
    )*};
}

compute_from!(
    grcup_core::invariants::InvariantError,
    grcup_core::groebner::GroebnerError,
    grcup_core::grassmann_ideal::IdealError
);
