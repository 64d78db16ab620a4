//! Command-line front end for `sigmap`.
//!
//! Every command renders as text, CSV or JSON. JSON output is wrapped in an
//! envelope carrying `schema_version`, the command name, the seed and the
//! overall pass flag. Exit codes: 0 success, 2 usage, 3 failed check,
//! 4 resource limit.

mod cubic;
mod groups;
mod identity;
mod output;
mod simulate;
mod tables;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use sigmap::Error;

pub use output::{Format, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sigmap", version, about = "2-Selmer signature spaces, 2-rank heuristics and binary cubic forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Number of worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for all random streams.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Absolute error budget for truncated infinite sums and products.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub eps: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regenerate the class, narrow 2-rank, signature rank and splitting tables.
    Tables(tables::TablesArgs),
    /// Compare orbit sizes, brute-force counts and the group-order quotient.
    MassCheck(groups::MassArgs),
    /// List the classes of maximal totally isotropic subspaces with representatives.
    ClassList(groups::ClassArgs),
    /// Randomized check of the Witt extension routine.
    WittSelftest(groups::WittArgs),
    /// Monte-Carlo simulation of the heuristic model against the closed forms.
    Simulate(simulate::SimulateArgs),
    /// Draw random cubic forms and keep the reduced maximal irreducible ones.
    CubicSample(cubic::SampleArgs),
    /// List every cubic field discriminant up to a bound with its reduced form.
    CubicScan(cubic::ScanArgs),
    /// Exact checks of the weighted p-tilde identity and the subspace formula.
    IdentityCheck(identity::IdentityArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tables(_) => "tables",
            Command::MassCheck(_) => "mass-check",
            Command::ClassList(_) => "class-list",
            Command::WittSelftest(_) => "witt-selftest",
            Command::Simulate(_) => "simulate",
            Command::CubicSample(_) => "cubic-sample",
            Command::CubicScan(_) => "cubic-scan",
            Command::IdentityCheck(_) => "identity-check",
        }
    }
}

/// Why a command stopped before producing a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Usage(String),
    Resource(String),
    Io(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Resource(_) => EXIT_RESOURCE,
            Failure::Io(_) | Failure::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Resource(m) => write!(f, "resource limit: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TooLarge { .. } | Error::DimensionTooLarge { .. } => Failure::Resource(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Rejects requests above `limit` with a resource-limit failure.
pub(crate) fn cap(what: &str, value: u64, limit: u64) -> Result<(), Failure> {
    if value > limit {
        Err(Failure::Resource(format!("{what} = {value} exceeds the limit {limit}")))
    } else {
        Ok(())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(f) => {
            eprintln!("sigmap {}: {f}", cli.command.name());
            f.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    if !(cli.eps > 0.0 && cli.eps < 1.0) {
        return Err(Failure::Usage(format!("--eps must lie in (0, 1), got {}", cli.eps)));
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        // a second initialization only happens when `run` is called twice in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Tables(a) => emit(cli, &tables::run(a, cli.eps)?),
        Command::MassCheck(a) => emit(cli, &groups::mass(a)?),
        Command::ClassList(a) => emit(cli, &groups::classes(a)?),
        Command::WittSelftest(a) => emit(cli, &groups::witt(a, cli.seed)?),
        Command::Simulate(a) => emit(cli, &simulate::run(a, cli.seed)?),
        Command::CubicSample(a) => emit(cli, &cubic::sample(a, cli.seed)?),
        Command::CubicScan(a) => emit(cli, &cubic::scan(a)?),
        Command::IdentityCheck(a) => emit(cli, &identity::run(a)?),
    }
}

fn emit<R: output::Report>(cli: &Cli, report: &R) -> Result<bool, Failure> {
    let body = output::render(report, cli.command.name(), cli.seed, cli.format)?;
    output::write_out(&body, cli.output.as_deref())?;
    if cli.format == Format::Csv {
        eprintln!("seed: {}", cli.seed);
    }
    Ok(report.passed())
}
