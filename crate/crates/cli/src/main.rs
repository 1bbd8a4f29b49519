//! `cqrate`: rate regions, `I_δ` curves and code checks for cq-sources.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cqrate_core::region::Mode;

use crate::output::CliError;

#[derive(Parser, Debug)]
#[command(name = "cqrate", version, about = "Classical-quantum Slepian-Wolf rate analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropic profile, genericity and corner points of a source.
    Analyze(AnalyzeArgs),
    /// Generic, inner and outer rate regions with boundary samples.
    Region(RegionArgs),
    /// The I_δ curve with I₀ and Ĩ₀ estimates.
    Idelta(IdeltaArgs),
    /// Average fidelity and decoupling check of a block code.
    VerifyCode(VerifyArgs),
    /// Seeded property suites.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Write the document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; json unless stated (selftest prints a text summary by default).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }
}

#[derive(Args, Debug, Clone)]
struct OptimizerArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random restarts per δ (default 64).
    #[arg(long)]
    restarts: Option<usize>,
    /// Cap on |W| (default |B|²).
    #[arg(long)]
    wdim: Option<usize>,
    /// JSON file with optimizer options; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    source: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Assisted)]
    mode: ModeArg,
    /// Output of `cqrate idelta` to reuse instead of optimizing again.
    #[arg(long)]
    idelta: Option<PathBuf>,
    /// Also run the Markov-chain interpolation between the DW and QSR points.
    #[arg(long)]
    markov: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct IdeltaArgs {
    #[arg(long)]
    source: PathBuf,
    /// Comma-separated δ values, e.g. `0,0.1,1`.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    delta_grid: Option<Vec<f64>>,
    /// Include the best channel found at each δ.
    #[arg(long)]
    params: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Unassisted)]
    mode: ModeArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run a single suite.
    #[arg(long)]
    suite: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ModeArg {
    Unassisted,
    Assisted,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Unassisted => Mode::Unassisted,
            ModeArg::Assisted => Mode::Assisted,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CQRATE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("CQRATE_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Region(a) => commands::region(&a),
        Command::Idelta(a) => commands::idelta(&a),
        Command::VerifyCode(a) => commands::verify_code(&a),
        Command::Selftest(a) => commands::selftest(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
