//! Command-line front end.
//!
//! ```text
//! pmx candidates <file> [--stats] [--json]
//! pmx solve <file> [--json]
//! pmx allocate <file> --price <p1,...,pn> [--json]
//! pmx plot <file> --output <svg>
//! ```
//!
//! Instance files are JSON:
//!
//! ```text
//! {
//!   "goods": 2,
//!   "arithmetic": "rational",          // or "float"; optional, default rational
//!   "tolerance": 1e-9,                 // optional, float mode only
//!   "bids": [{"id": "a", "values": ["2", "3"], "budget": "10"}],
//!   "supply": [{"steps": [{"until": "100", "marginal": "0"}]},
//!              {"steps": [{"until": "100", "marginal": "0"}]}]
//! }
//! ```
//!
//! Numbers are decimal strings (`"3.75"`, `"1e2"`) or fractions (`"15/4"`).
//! Exit status is 0 on success, 2 on invalid input and 1 on internal failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::allocation::{revenue_at, solve_auction, AllocationError, ClearingResult};
use crate::candidates::filtered_prices;
use crate::io::{
    parse_price_list, read_instance, CandidatesReport, ClearingReport, LoadError, LoadedInstance,
};
use crate::model::{AuctionInstance, PriceVector};
use crate::plot::{render_price_space, PlotError};
use crate::scalar::Scalar;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PMX_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "pmx",
    version,
    about = "Budget-constrained product-mix auction solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List candidate equilibrium prices with their witnesses.
    Candidates {
        file: PathBuf,
        /// Print enumeration and pruning counts.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
    },
    /// Find the revenue-maximizing price and allocation.
    Solve {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Best envy-free allocation at a fixed price.
    Allocate {
        file: PathBuf,
        /// Comma-separated prices, one per good.
        #[arg(long, allow_hyphen_values = true)]
        price: String,
        #[arg(long)]
        json: bool,
    },
    /// Draw the two-good price plane as SVG.
    Plot {
        file: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("--price: {0}")]
    Price(String),
    #[error(transparent)]
    Plot(#[from] PlotError),
    #[error("no envy-free allocation fits within supply capacity at this price")]
    NoAllocation,
    #[error("internal error: {0}")]
    Internal(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Load(_) | CliError::Price(_) | CliError::Plot(_) | CliError::NoAllocation => {
                2
            }
            CliError::Internal(_) | CliError::Write { .. } => 1,
        }
    }
}

/// Reads `PMX_THREADS` and sizes the global worker pool. Invalid or zero
/// values are ignored.
pub fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if the pool was already built; keep that pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

/// Runs the CLI and returns the process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().trim_end());
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Candidates { file, stats, json } => match read_instance(&file)? {
            LoadedInstance::Rational(i) => candidates(&i, stats, json, out),
            LoadedInstance::Float(i) => candidates(&i, stats, json, out),
        },
        Command::Solve { file, json } => match read_instance(&file)? {
            LoadedInstance::Rational(i) => solve(&i, json, out),
            LoadedInstance::Float(i) => solve(&i, json, out),
        },
        Command::Allocate { file, price, json } => match read_instance(&file)? {
            LoadedInstance::Rational(i) => allocate(&i, &price, json, out),
            LoadedInstance::Float(i) => allocate(&i, &price, json, out),
        },
        Command::Plot { file, output } => {
            let svg = match read_instance(&file)? {
                LoadedInstance::Rational(i) => plot(&i)?,
                LoadedInstance::Float(i) => plot(&i)?,
            };
            std::fs::write(&output, svg).map_err(|source| CliError::Write {
                path: output.display().to_string(),
                source,
            })
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn candidates<S: Scalar>(
    instance: &AuctionInstance<S>,
    stats: bool,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let set = filtered_prices(instance);
    if json {
        return emit(out, &to_json(&CandidatesReport::new(instance, &set))?);
    }
    let mut text = String::new();
    for record in &set.records {
        let ids: Vec<&str> = record
            .witness
            .bids
            .iter()
            .map(|&b| instance.bids()[b].id())
            .collect();
        let sigma: Vec<String> = record.witness.sigma.iter().map(|s| s.to_string()).collect();
        text += &format!(
            "{}\tbids={} sigma={}\n",
            record.price,
            ids.join(","),
            sigma.join(",")
        );
    }
    if stats {
        let s = &set.stats;
        text += &format!("total combinations: {}\n", s.total_combinations);
        text += &format!("calls: {}\n", s.calls);
        text += &format!("skipped: {}\n", s.skipped);
        text += &format!("infeasible: {}\n", s.infeasible);
        text += &format!("unique candidates: {}\n", s.unique_candidates);
    }
    emit(out, &text)
}

fn report<S: Scalar>(result: &ClearingResult<S>) -> String {
    let mut text = format!(
        "price: {}\nrevenue: {}\npayments: {}\n",
        result.price,
        result.revenue,
        result.payments()
    );
    let aggregate: Vec<String> = result
        .aggregate
        .as_slice()
        .iter()
        .map(|v| v.to_string())
        .collect();
    text += &format!("aggregate: {}\n", aggregate.join(" "));
    for a in &result.allocation {
        let bundle: Vec<String> = a.bundle.as_slice().iter().map(|v| v.to_string()).collect();
        text += &format!("bid {}: {}\n", a.id, bundle.join(" "));
    }
    text
}

fn allocation_error(e: AllocationError) -> CliError {
    match e {
        AllocationError::NoEnvyFreeAllocation => CliError::NoAllocation,
        AllocationError::Price(m) => CliError::Price(m.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn solve<S: Scalar>(
    instance: &AuctionInstance<S>,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let result = solve_auction(instance).map_err(allocation_error)?;
    if json {
        emit(out, &to_json(&ClearingReport::from_result(&result))?)
    } else {
        emit(out, &report(&result))
    }
}

fn parse_price<S: Scalar>(text: &str, goods: usize) -> Result<PriceVector<S>, CliError> {
    parse_price_list(text, goods).map_err(|e| CliError::Price(e.to_string()))
}

fn allocate<S: Scalar>(
    instance: &AuctionInstance<S>,
    price: &str,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let p = parse_price(price, instance.goods())?;
    let result = revenue_at(instance, &p).map_err(allocation_error)?;
    if json {
        emit(out, &to_json(&ClearingReport::from_result(&result))?)
    } else {
        emit(out, &report(&result))
    }
}

fn plot<S: Scalar>(instance: &AuctionInstance<S>) -> Result<String, CliError> {
    let prices = if instance.goods() == 2 {
        filtered_prices(instance).prices()
    } else {
        Vec::new()
    };
    Ok(render_price_space(instance, &prices)?)
}
