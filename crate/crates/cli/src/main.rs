mod analyze;
mod commands;
mod csv;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use analyze::AnalyzeArgs;

/// Enumeration and series analysis for 1324-avoiding permutations.
#[derive(Parser, Debug)]
#[command(name = "avoid1324", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count 1324-avoiders for every n up to the given size.
    Enumerate(EnumerateArgs),
    /// Compare counts against brute force.
    Verify(VerifyArgs),
    /// Inspect prefix signatures.
    Sig {
        #[command(subcommand)]
        action: SigAction,
    },
    /// Asymptotic analysis of a series file.
    Analyze(AnalyzeArgs),
    /// Reconstruct a series from per-prime residue manifests.
    CrtCombine(CrtArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineMode {
    Crt,
    Bigint,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=63))]
    n: u32,
    #[arg(long, value_enum, default_value = "crt")]
    mode: EngineMode,
    /// Comma-separated primes, or `auto`.
    #[arg(long, default_value = "auto")]
    primes: String,
    /// Probability of storing a computed count in the memo table.
    #[arg(long = "memo-prob", default_value_t = 1.0)]
    memo_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "on")]
    factorize: Toggle,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "manifest-dir")]
    manifest_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long = "max-n")]
    max_n: usize,
    #[arg(long, default_value = "1324")]
    pattern: String,
}

#[derive(Subcommand, Debug)]
enum SigAction {
    /// Print the canonical form.
    Canonical { signature: String },
    /// Print the signatures reached by placing one more value.
    Children { signature: String },
    /// Print the number of completions.
    Count { signature: String },
    /// Print the 128-bit key in hex.
    Encode {
        signature: String,
        /// Print the meaningful bits instead.
        #[arg(long)]
        binary: bool,
    },
    /// Decode a hex key.
    Decode { key: String },
    /// Signature after placing a prefix of a permutation of size n.
    FromPrefix {
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',')]
        prefix: Vec<u32>,
    },
}

#[derive(Args, Debug)]
struct CrtArgs {
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    check: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes with stable exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Mismatch(String),
    Integrity(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Integrity(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Mismatch(m) | CliError::Integrity(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate(args) => commands::enumerate(args),
        Command::Verify(args) => commands::verify(args),
        Command::Sig { action } => commands::sig(action),
        Command::Analyze(args) => analyze::run(args),
        Command::CrtCombine(args) => commands::crt_combine(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
