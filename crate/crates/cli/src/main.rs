mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polarlab::fast::ListAlgorithm;
use polarlab::sim::QuantMode;

#[derive(Debug, Parser)]
#[command(name = "polarlab", version, about = "Polar and LDPC decoding experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a reliability order and frozen set.
    Construct(ConstructArgs),
    /// Encode one payload with the code of a config.
    Encode(EncodeArgs),
    /// Decode one frame and print the list trace.
    Decode(DecodeArgs),
    /// Run the SNR sweep of a config.
    Simulate(SimulateArgs),
    /// Run a polar and an LDPC config into one table.
    Compare(CompareArgs),
    /// Classify the decoding tree and count time steps.
    Steps(StepsArgs),
    /// Rank per-partition CRC allocations for PSCL.
    SweepCrc(SweepCrcArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Ga,
    Bhattacharyya,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Algo {
    Scl,
    Sscl,
    #[value(name = "fast_sscl", alias = "fast-sscl")]
    FastSscl,
}

impl From<Algo> for ListAlgorithm {
    fn from(a: Algo) -> Self {
        match a {
            Algo::Scl => ListAlgorithm::Scl,
            Algo::Sscl => ListAlgorithm::Sscl,
            Algo::FastSscl => ListAlgorithm::FastSscl,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Quant {
    Float,
    Fixed,
}

impl From<Quant> for QuantMode {
    fn from(q: Quant) -> Self {
        match q {
            Quant::Float => QuantMode::Float,
            Quant::Fixed => QuantMode::Fixed,
        }
    }
}

/// Parallelism and number-format overrides shared by simulating commands.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override the quantizer mode of the config.
    #[arg(long, value_enum)]
    pub quant: Option<Quant>,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long, value_enum, default_value = "ga")]
    pub method: Method,
    /// Design Eb/N0 in dB.
    #[arg(long, default_value_t = 2.0)]
    pub design_ebn0: f64,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Directory receiving reliability.txt and frozen.txt.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Payload as a 0/1 string; drawn from the frame stream if absent.
    #[arg(long)]
    pub payload: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub frame: u64,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Whitespace-separated channel LLRs.
    #[arg(long, conflicts_with = "ebn0")]
    pub llrs: Option<PathBuf>,
    /// Generate the frame at this Eb/N0 instead.
    #[arg(long)]
    pub ebn0: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub frame: u64,
    #[arg(long, value_enum)]
    pub quant: Option<Quant>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// CSV destination (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub polar: PathBuf,
    #[arg(long)]
    pub ldpc: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct StepsArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long = "L")]
    pub list_size: usize,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Processing elements per stage.
    #[arg(long, default_value_t = 32)]
    pub pe: usize,
    /// Node schedule CSV of the chosen algorithm.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepCrcArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long = "P")]
    pub partitions: usize,
    #[arg(long = "L")]
    pub list_size: usize,
    /// Candidate CRC widths per partition, multiples of four.
    #[arg(long, value_delimiter = ',', required = true)]
    pub crc_lengths: Vec<usize>,
    /// Eb/N0 (dB) at which allocations are compared.
    #[arg(long)]
    pub ebn0: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    #[arg(long, default_value_t = 100_000)]
    pub max_frames: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polarlab: {e}");
            e.exit_code()
        }
    }
}
