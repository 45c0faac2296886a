//! Command-line front end for `nswiener-core`.
//!
//! Every command reads and writes JSON operator files (see
//! [`operator_file`]) and reports failures through the exit codes of
//! [`Exit`].

pub mod commands;
pub mod error;
pub mod operator_file;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{CliError, Exit};

/// Environment variable holding the power-iteration seed.
pub const SEED_ENV: &str = "NSWIENER_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "nswiener",
    version,
    about = "Non-stationary Wiener algebra toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the product A·B.
    Multiply {
        a: PathBuf,
        b: PathBuf,
        out: PathBuf,
    },
    /// Write the adjoint of an operator.
    Adjoint { input: PathBuf, out: PathBuf },
    /// Print Wiener, Hilbert-Schmidt and estimated operator norms as JSON.
    Norm { input: PathBuf },
    /// Evaluate the Zadeh transform at a point z of the closed unit disk.
    Zadeh {
        input: PathBuf,
        /// The point as "re,im".
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Output file; stdout when omitted.
        out: Option<PathBuf>,
    },
    /// Spectral factorization W = W+* W+; writes PREFIX.factor.json,
    /// PREFIX.inverse.json and PREFIX.report.json.
    Factor {
        input: PathBuf,
        prefix: PathBuf,
        /// Padding on each side of the window [default: 4 x band width].
        #[arg(long)]
        pad: Option<usize>,
        /// Stabilization tolerance between padding P and 2P.
        #[arg(long, default_value_t = nswiener_core::factorization::DEFAULT_STABILIZATION_TOL)]
        tol: f64,
        /// Truncation threshold for the inverse diagonals.
        #[arg(long, default_value_t = nswiener_core::factorization::DEFAULT_EPS_TAIL)]
        eps_tail: f64,
        /// Last inverse diagonal kept [default: 8 x band width].
        #[arg(long)]
        max_offset: Option<usize>,
        /// Comma-separated angles t for the boundary check.
        #[arg(long, default_value = "0,1,2.5", allow_hyphen_values = true)]
        t_samples: String,
        /// Tolerance of the verification that decides the exit code.
        #[arg(long, default_value_t = nswiener_core::factorization::DEFAULT_VERIFY_TOL)]
        verify_tol: f64,
    },
    /// Check a factor of W: reconstruction, boundary identity, inverse and
    /// agreement with an independent run.
    Verify {
        input: PathBuf,
        factor: PathBuf,
        /// Comma-separated angles t for the boundary check.
        #[arg(long, default_value = "0,1,2.5", allow_hyphen_values = true)]
        t_samples: String,
        #[arg(long, default_value_t = nswiener_core::factorization::DEFAULT_VERIFY_TOL)]
        tol: f64,
        /// Padding of the independent run [default: 8 x band width].
        #[arg(long)]
        pad: Option<usize>,
    },
}

/// Parses arguments and runs one command, returning the exit code.
pub fn run<I, T>(args: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Exit::Parse
            } else {
                Exit::Ok
            };
        }
    };
    match commands::execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    }
}
