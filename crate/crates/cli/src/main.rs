mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use openimage_core::Error;

#[derive(Parser, Debug)]
#[command(name = "openimage", version, about = "Finite-level experiments on l-adic image groups and their covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Spec document (JSON).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Bundled example document, by name.
    #[arg(long, conflicts_with = "spec")]
    pub example: Option<String>,
    /// Working level N; defaults to the document's level.
    #[arg(long)]
    pub level: Option<u32>,
    /// Group-order cap for enumerated closures.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0x0b5e_55ed)]
    pub seed: u64,
    /// Cross-run brute-force oracles where they are affordable.
    #[arg(long)]
    pub oracle: bool,
    /// Directory for CSV reports; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orders, layer sizes and abelianizations of a tower.
    Group(Common),
    /// Frattini modular system C_n and the uniform index bound.
    Modsys(Common),
    /// Genus and lambda of the covers in a cover block.
    Covers(Common),
    /// Double-coset ratio series for subgroups C and I.
    Doublecosets(Common),
    /// Lie-perfectness diagnostics: abelianization growth and bracket divisors.
    LpCheck(Common),
    /// Subgroup atlas of PGL2(F_q).
    Pgl2 {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Identity checks over the bundled examples.
    Verify(Common),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) failed")]
    Failed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::AssumptionViolated(_)) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Group(c) => commands::group(c),
        Command::Modsys(c) => commands::modsys(c),
        Command::Covers(c) => commands::covers(c),
        Command::Doublecosets(c) => commands::doublecosets(c),
        Command::LpCheck(c) => commands::lp_check(c),
        Command::Pgl2 { q, common } => commands::pgl2(*q, common),
        Command::Verify(c) => verify::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
