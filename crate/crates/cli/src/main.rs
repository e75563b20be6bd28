//! `gnp`: exact, asymptotic and simulated component statistics of G(n,p).
//!
//! Output is CSV with a header row by default, or `--json`. Exit codes:
//! 0 success, 2 invalid input, 3 resource limit, 4 bound violation.

mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gnp_core::asymptotics::highprec::DEFAULT_PRECISION_BITS;
use gnp_core::counting::ORACLE_DEFAULT_MAX_N;
use gnp_core::montecarlo::DEFAULT_STREAMS;

use commands::CountTableKind;
use output::Table;

#[derive(Parser, Debug)]
#[command(name = "gnp", version, about = "Component counts of Erdős–Rényi random graphs G(n,p)")]
struct Cli {
    /// Emit {"metadata": ..., "records": [...]} instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Output precision of the float backend, in bits.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact p_n, π_n, component pmf and factorial moments.
    ///
    /// Columns: quantity (pn|pi|pmf|shifted_moment|moment), n, s, exact (num/den), decimal.
    Exact(ExactArgs),
    /// Labeled graph counts by edges and components.
    ///
    /// Columns: table (A|B|A_s|F), n, k (edges), s (components), count.
    Counts(CountsArgs),
    /// Two-sided bounds on p_n and π_n with exact checks; exits 4 on a violation.
    ///
    /// One row per (n, p): exact pn/pi/pi_next, then for each bound its
    /// value, decimal, vacuous flag and whether it holds.
    Bounds(BoundsArgs),
    /// Float-backend moments against their large-n approximations.
    ///
    /// Columns: n, p, s, exact, approx, ratio, zone.
    Converge(ConvergeArgs),
    /// Monte Carlo estimates from a seeded, reproducible run.
    ///
    /// Columns: quantity, s, estimate, std_error, count.
    Simulate(SimulateArgs),
    /// Exact values by enumerating every graph (small n only).
    ///
    /// Columns: quantity (pmf|pn|pi), n, s, exact, decimal.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Pn,
    Pmf,
    Pi,
    Moments,
    All,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long)]
    n: u32,
    /// Edge probability as num/den.
    #[arg(long)]
    p: String,
    /// Highest factorial moment order (default min(2, n)).
    #[arg(long)]
    smax: Option<u32>,
    #[arg(long, value_enum, default_value_t = What::All)]
    what: What,
}

#[derive(Args, Debug)]
pub struct CountsArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, value_enum, default_value_t = CountTableKind::All)]
    table: CountTableKind,
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// A single n or an inclusive range a..b.
    #[arg(long)]
    n: String,
    /// One or more probabilities num/den, comma separated.
    #[arg(long)]
    p: String,
    /// Only evaluate the bound expressions.
    #[arg(long)]
    no_exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ZoneArg {
    /// p chosen so that n q^n = --alpha; approximation (n q^n)^s.
    #[value(name = "NQN_CONST")]
    NqnConst,
    /// p = --c / n; approximation ((n/α) β(α e^{-α}))^s with α = -n ln q.
    #[value(name = "QN_CONST")]
    QnConst,
    /// Fixed --p; approximation (β(n p q^n) / p)^s.
    #[value(name = "FIXED_P")]
    FixedP,
}

impl ZoneArg {
    fn as_str(self) -> &'static str {
        match self {
            ZoneArg::NqnConst => "NQN_CONST",
            ZoneArg::QnConst => "QN_CONST",
            ZoneArg::FixedP => "FIXED_P",
        }
    }
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[arg(long, value_enum)]
    zone: ZoneArg,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    c: Option<String>,
    /// Decimal edge probability (FIXED_P only).
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated vertex counts.
    #[arg(long, default_value = "100,200,400,800")]
    n: String,
    /// Comma-separated moment orders.
    #[arg(long, default_value = "1")]
    s: String,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    n: u32,
    /// Edge probability as a decimal.
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STREAMS)]
    streams: u32,
    /// Highest shifted factorial moment to estimate.
    #[arg(long, default_value_t = 2)]
    smax: u32,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = ORACLE_DEFAULT_MAX_N)]
    max_n: u32,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(gnp_core::Error),
    Violation(String),
    Io(String),
}

impl From<gnp_core::Error> for CliError {
    fn from(e: gnp_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(gnp_core::Error::ResourceLimit { .. }) => 3,
            CliError::Core(_) => 2,
            CliError::Violation(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Violation(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn emit(table: &Table, json: bool) -> Result<(), CliError> {
    let mut buf = Vec::new();
    if json {
        serde_json::to_writer_pretty(&mut buf, &table.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
        buf.push(b'\n');
    } else {
        table.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    }
    match io::stdout().lock().write_all(&buf) {
        // a closed pipe (e.g. `| head`) is not an error
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Exact(a) => emit(&commands::exact(a)?, cli.json),
        Command::Counts(a) => emit(&commands::counts(a)?, cli.json),
        Command::Bounds(a) => {
            let (table, pass) = commands::bounds(&a.n, &a.p, !a.no_exact)?;
            emit(&table, cli.json)?;
            if pass {
                Ok(())
            } else {
                Err(CliError::Violation("a non-vacuous bound is violated".into()))
            }
        }
        Command::Converge(a) => emit(&commands::converge(a, cli.precision_bits)?, cli.json),
        Command::Simulate(a) => emit(&commands::simulate(a)?, cli.json),
        Command::Oracle(a) => emit(&commands::oracle(a.n, &a.p, a.max_n)?, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
