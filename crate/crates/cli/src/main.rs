use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wgkat_cli::{load, run_axioms, run_check, run_dot, run_nf, CliError};
use wgkat_core::semiring::SemiringId;
use wgkat_core::syntax::DEFAULT_MAX_TESTS;

/// Equivalence checking for weighted guarded programs.
#[derive(Parser)]
#[command(name = "wgkat", version)]
struct Cli {
    /// Maximum number of primitive tests a session may declare.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TESTS)]
    max_tests: usize,
    /// Only print failures.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide every `check` line of a session file.
    Check { file: PathBuf },
    /// Print the one-step normal form of a bound expression.
    Nf { file: PathBuf, name: String },
    /// Print the automaton of a bound expression in DOT format.
    Dot { file: PathBuf, name: String },
    /// Check random instances of the axioms.
    Axioms {
        #[arg(long, value_delimiter = ',', required = true)]
        semiring: Vec<SemiringId>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Run only a deliberately unsound variant of W4, which should fail.
        #[arg(long)]
        control: bool,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut out = io::stdout().lock();
    let ok = match cli.command {
        Command::Check { file } => run_check(&load(&file, cli.max_tests)?, cli.quiet, &mut out)?,
        Command::Nf { file, name } => {
            run_nf(&load(&file, cli.max_tests)?, &name, &mut out)?;
            true
        }
        Command::Dot { file, name } => {
            run_dot(&load(&file, cli.max_tests)?, &name, &mut out)?;
            true
        }
        Command::Axioms {
            semiring,
            seed,
            count,
            control,
        } => run_axioms(&semiring, seed, count, control, cli.quiet, &mut out)?,
    };
    out.flush()?;
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
