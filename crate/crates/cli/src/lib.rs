//! Library half of the `markov-ot` command-line tool.
//!
//! [`run_command`] parses arguments and runs one subcommand. Usage errors
//! exit with code 2; invalid inputs and solver failures exit with 1.

mod args;
mod commands;

use std::fmt;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use markov_ot::files::{ChainFile, CostSpec};
use markov_ot::{DiscountedProblem, MarkovChain};

pub use args::Cli;

/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit code for inputs that fail validation and for solver failures.
pub const EXIT_FAILURE: i32 = 1;

/// Error raised by a subcommand.
#[derive(Debug)]
pub enum CliError {
    /// Arguments are well-formed but inconsistent.
    Usage(String),
    /// Input or runtime failure.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<markov_ot::Error> for CliError {
    fn from(e: markov_ot::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Reads and validates a chain file. Every violation is reported on its
/// own line.
pub fn load_chain(path: &Path) -> CliResult<MarkovChain> {
    let file = ChainFile::read(path).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
    let (chain, violations) = file.to_chain_unchecked();
    if violations.is_empty() {
        return Ok(chain);
    }
    let mut msg = format!("{}: invalid chain", path.display());
    for v in violations {
        msg.push_str(&format!("\n  - {v}"));
    }
    Err(CliError::Failure(msg))
}

/// Loads two chains and a cost spec into a validated problem. Without a
/// cost spec the cost is `|r_X(x) - r_Y(y)|`.
pub fn load_problem(
    chain_x_path: &Path,
    chain_y_path: &Path,
    cost_spec: Option<&Path>,
    gamma: f64,
) -> CliResult<DiscountedProblem> {
    let x = load_chain(chain_x_path)?;
    let y = load_chain(chain_y_path)?;
    let spec = match cost_spec {
        Some(p) => CostSpec::read(p).map_err(|e| CliError::Failure(format!("{}: {e}", p.display())))?,
        None => CostSpec::default(),
    };
    let cost = spec.build(&x, &y, gamma)?;
    Ok(DiscountedProblem::new(x, y, cost, gamma)?)
}

/// Runs the tool on `argv` (including the program name), writing results
/// to `out` and messages to `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests also arrive here, with exit code 0.
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match commands::run(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
