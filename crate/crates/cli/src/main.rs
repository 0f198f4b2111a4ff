//! `stratmorse`: command-line driver.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on input errors, 3 when a collapse search ran out of budget.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "stratmorse", version, about = "Stratified discrete Morse theory on regular CW complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Print records as nested key/value blocks.
    #[arg(long, global = true)]
    pub json_like: bool,
    /// Ignore level lines and use level = dimension.
    #[arg(long, global = true)]
    pub skeletal: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the complex, the stratification, and any values or field.
    Validate { file: PathBuf },
    /// List strata and the frontier order.
    Strata { file: PathBuf },
    /// Halo, augmented halo and shadow of a cell.
    Halo {
        file: PathBuf,
        #[arg(long)]
        cell: String,
    },
    /// Stratum-wise Forman classification.
    Classify { file: PathBuf },
    /// Validate a stratified discrete Morse function.
    CheckMorse {
        file: PathBuf,
        #[arg(long, default_value_t = stratmorse::DEFAULT_BUDGET)]
        budget: u64,
        /// Break value ties by small offsets in cell-id order first.
        #[arg(long)]
        tiebreak: bool,
    },
    /// Sweep sublevel closures in increasing value order.
    Sweep {
        file: PathBuf,
        #[arg(long, default_value_t = stratmorse::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Difference of sublevel closures across an interval.
    Delta {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lo: String,
        #[arg(long, allow_hyphen_values = true)]
        hi: String,
    },
    /// Print the barycentric subdivision as a cwx document.
    Subdivide { file: PathBuf },
    /// Lower link of a barycenter with its horizontal and vertical parts.
    Lowerlink {
        file: PathBuf,
        #[arg(long)]
        cell: String,
    },
    /// Tangential/normal decomposition checks at a critical cell.
    TheoremC {
        file: PathBuf,
        #[arg(long)]
        cell: String,
        /// Skip the criticality requirement and the normal-strata check.
        #[arg(long)]
        pushout_only: bool,
    },
    /// Conley indices and the E1 page of the multivector field.
    Conley { file: PathBuf },
    /// Integer homology, optionally relative to the subcomplex listed in FILE.
    Homology {
        file: PathBuf,
        #[arg(long)]
        rel: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
