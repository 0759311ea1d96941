//! `charshift`: batch runner and inspection tool for the shifted character
//! simulators.

mod inspect;
mod run;

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "charshift", version, about = "Simulate and inspect shifted character problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shifted Legendre symbol over Z_p.
    Slsp {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Shifted Jacobi symbol over Z_n with n known.
    Sjsp {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Shifted Jacobi symbol with n hidden inside a domain of size M.
    SjspUnknown {
        #[arg(long)]
        n: u64,
        #[arg(long = "M")]
        m: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Shifted quadratic character over GF(p^r).
    Sqcp {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: usize,
        /// Monic modulus, low degree first, e.g. "1,0,1" for X^2+1.
        #[arg(long)]
        modulus: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact and numeric Gauss sums.
    Gauss(inspect::GaussArgs),
    /// Numerical checks of the underlying identities.
    Verify {
        #[command(subcommand)]
        suite: inspect::VerifySuite,
    },
    /// Writes the full `x,f(x)` table of an oracle as CSV.
    OracleDump(inspect::DumpArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Explicit shift (integer, or field coefficients like "2,1") or "random".
    #[arg(long, default_value = "random")]
    pub shift: String,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Report wall-clock time in the summary. Breaks byte-identical reruns.
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Simulation(String),
    Violation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Simulation(_) => 3,
        }
    }

    pub fn config(e: impl fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn sim(e: impl fmt::Display) -> Self {
        CliError::Simulation(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Simulation(m) => write!(f, "simulation error: {m}"),
            CliError::Violation(m) => write!(f, "check failed: {m}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn open_output(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(CliError::sim)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Slsp { p, run } => run::run(run::Problem::Slsp { p }, &run),
        Command::Sjsp { n, run } => run::run(run::Problem::Sjsp { n }, &run),
        Command::SjspUnknown { n, m, run } => run::run(run::Problem::SjspUnknown { n, m }, &run),
        Command::Sqcp { p, r, modulus, run } => run::run(run::Problem::Sqcp { p, r, modulus }, &run),
        Command::Gauss(args) => inspect::gauss(&args),
        Command::Verify { suite } => inspect::verify(&suite),
        Command::OracleDump(args) => inspect::oracle_dump(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CHARSHIFT_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("charshift: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
