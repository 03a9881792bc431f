//! `mmulrv`: run guests on the RV32EC simulator under BA, CI-AE or CI-PE and
//! report cycles, interrupt latency and estimated energy.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmulrv_core::guest::GuestInputs;
use mmulrv_core::Config;
use num_bigint::BigUint;
use num_traits::Num;
use thiserror::Error;

/// Process exit status for a run that halted cleanly.
pub const EXIT_HALTED: u8 = 0;
/// Usage, I/O or configuration errors.
pub const EXIT_ERROR: u8 = 1;
/// The guest trapped with no handler installed.
pub const EXIT_TRAP: u8 = 3;
/// The cycle budget ran out before the guest halted.
pub const EXIT_BUDGET: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("configurations produced different results for `{0}`; workloads do not match")]
    MismatchedWorkloads(String),
    #[error("self-test failed: {0} mismatches")]
    SelfTestFailed(usize),
}

#[derive(Debug, Parser)]
#[command(name = "mmulrv", version, about = "RV32EC simulator with a memory-coupled Montgomery multiplier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one guest under one configuration.
    Run(RunArgs),
    /// Run guests under several configurations and compare against the first.
    Compare(CompareArgs),
    /// Check guest arithmetic against the host oracle on random vectors.
    Selftest(SelftestArgs),
    /// Encode or decode an MMUL instruction word.
    Encode(EncodeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Machine knobs shared by `run` and `compare`.
#[derive(Debug, Clone, Args)]
pub struct MachineArgs {
    /// Largest MMUL operand length the unit accepts, in 32-bit words.
    #[arg(long)]
    pub words: Option<usize>,
    /// Cycles per memory read.
    #[arg(long, default_value_t = 1)]
    pub read_latency: u32,
    /// Cycles per memory write.
    #[arg(long, default_value_t = 1)]
    pub write_latency: u32,
    /// Stop after this many cycles.
    #[arg(long)]
    pub budget: Option<u64>,
}

/// Guest data inputs as hex big integers (with or without `0x`).
#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    #[arg(long, value_parser = parse_hex)]
    pub modulus: Option<BigUint>,
    #[arg(long = "a", value_parser = parse_hex)]
    pub a: Option<BigUint>,
    #[arg(long = "b", value_parser = parse_hex)]
    pub b: Option<BigUint>,
    #[arg(long, value_parser = parse_hex)]
    pub base: Option<BigUint>,
    #[arg(long, value_parser = parse_hex)]
    pub exponent: Option<BigUint>,
    #[arg(long, value_parser = parse_hex)]
    pub scalar: Option<BigUint>,
    /// Scalar bits the ladder processes.
    #[arg(long)]
    pub scalar_bits: Option<u32>,
    #[arg(long = "u", value_parser = parse_hex)]
    pub u: Option<BigUint>,
}

impl From<&InputArgs> for GuestInputs {
    fn from(i: &InputArgs) -> Self {
        GuestInputs {
            modulus: i.modulus.clone(),
            a: i.a.clone(),
            b: i.b.clone(),
            base: i.base.clone(),
            exponent: i.exponent.clone(),
            scalar: i.scalar.clone(),
            scalar_bits: i.scalar_bits,
            u: i.u.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub guest: String,
    /// BA, CI-AE or CI-PE; defaults to BA, or to the mode a sweep guest measures.
    #[arg(long)]
    pub config: Option<Config>,
    #[command(flatten)]
    pub machine: MachineArgs,
    #[command(flatten)]
    pub inputs: InputArgs,
    /// Assert the external interrupt at these cycles (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub irq: Vec<u64>,
    /// Re-run once per assert cycle in `start:end[:step]` (end exclusive).
    #[arg(long, value_parser = parse_sweep, conflicts_with = "irq")]
    pub sweep: Option<Sweep>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Guests to compare (repeatable); one table row each.
    #[arg(long, required = true)]
    pub guest: Vec<String>,
    /// Configurations as `NAME[@READ[/WRITE]]`; the first is the reference.
    #[arg(long = "config", value_parser = parse_column, default_values = ["BA", "CI-AE", "CI-PE"])]
    pub configs: Vec<Column>,
    #[command(flatten)]
    pub machine: MachineArgs,
    #[command(flatten)]
    pub inputs: InputArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Random vectors per operand length.
    #[arg(long, default_value_t = 25)]
    pub vectors: usize,
    /// Operand lengths to test, in words.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8])]
    pub words: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Decode this instruction word instead of encoding.
    #[arg(long, value_parser = parse_u32_hex, conflicts_with_all = ["rd", "rs1", "rs2", "rs3", "words"])]
    pub decode: Option<u32>,
    #[arg(long, default_value_t = 10)]
    pub rd: u8,
    #[arg(long, default_value_t = 11)]
    pub rs1: u8,
    #[arg(long, default_value_t = 12)]
    pub rs2: u8,
    #[arg(long, default_value_t = 13)]
    pub rs3: u8,
    #[arg(long, default_value_t = 8)]
    pub words: u32,
    /// Also print the operand-capacity table for the candidate formats.
    #[arg(long)]
    pub capacity: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sweep {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

/// One comparison column: a configuration plus memory latencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub config: Config,
    pub read_latency: Option<u32>,
    pub write_latency: Option<u32>,
}

fn parse_hex(s: &str) -> Result<BigUint, String> {
    let digits = s.trim_start_matches("0x").trim_start_matches("0X").replace('_', "");
    BigUint::from_str_radix(&digits, 16).map_err(|e| format!("`{s}` is not a hex integer: {e}"))
}

fn parse_u32_hex(s: &str) -> Result<u32, String> {
    let v = parse_hex(s)?;
    u32::try_from(&v).map_err(|_| format!("`{s}` does not fit in 32 bits"))
}

fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let parts: Vec<u64> = s
        .split(':')
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("`{p}` in sweep `{s}`: {e}")))
        .collect::<Result<_, _>>()?;
    let sweep = match parts[..] {
        [start, end] => Sweep { start, end, step: 1 },
        [start, end, step] => Sweep { start, end, step },
        _ => return Err(format!("sweep `{s}` must be start:end[:step]")),
    };
    if sweep.step == 0 || sweep.end <= sweep.start {
        return Err(format!("sweep `{s}` needs end > start and a nonzero step"));
    }
    Ok(sweep)
}

fn parse_column(s: &str) -> Result<Column, String> {
    let (name, lat) = match s.split_once('@') {
        Some((n, l)) => (n, Some(l)),
        None => (s, None),
    };
    let config: Config = name.parse().map_err(|e| format!("{e}"))?;
    let num = |x: &str| x.parse::<u32>().map_err(|e| format!("latency `{x}` in `{s}`: {e}"));
    let (read_latency, write_latency) = match lat.map(|l| l.split_once('/')) {
        None => (None, None),
        Some(None) => (Some(num(lat.unwrap())?), None),
        Some(Some((r, w))) => (Some(num(r)?), Some(num(w)?)),
    };
    Ok(Column { config, read_latency, write_latency })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Compare(args) => commands::compare(&args),
        Command::Selftest(args) => commands::selftest(&args),
        Command::Encode(args) => commands::encode(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
