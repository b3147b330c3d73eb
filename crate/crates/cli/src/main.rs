use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod gnuplot;

/// Long-run variance estimation and HAR inference under low-frequency contamination.
#[derive(Debug, Parser)]
#[command(name = "harcontam", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a path from a builtin model or a JSON spec file and write it as CSV.
    Simulate(SimulateArgs),
    /// Write ACF, periodogram and local periodogram data files for a series.
    Diagnose(DiagnoseArgs),
    /// Estimate the long-run variance of a series.
    Lrv(LrvArgs),
    /// Two-sided t-test on the mean of a series.
    Ttest(TtestArgs),
    /// Test of equal predictive accuracy from a loss file or a simulated design.
    Dmtest(DmtestArgs),
    /// Run a Monte Carlo size/power experiment.
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Stationary,
    Zero,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Builtin model (M1..M4) or path to a JSON spec.
    #[arg(long)]
    spec: String,
    #[arg(long = "T", short = 'T')]
    t_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InitArg::Stationary)]
    init: InitArg,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    /// Series CSV (header row, first column used).
    #[arg(short, long)]
    input: PathBuf,
    /// Output directory for data files and gnuplot scripts.
    #[arg(short, long)]
    output: PathBuf,
    /// Comma-separated break fractions in (0, 1); enables the d̂* correction.
    #[arg(long, value_delimiter = ',')]
    breaks: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    max_lag: usize,
    /// Time fractions for local periodograms.
    #[arg(long = "u", value_delimiter = ',')]
    u: Vec<f64>,
    /// Local window length; defaults to ⌊T^0.6⌋ rounded down to even.
    #[arg(long)]
    n_t: Option<usize>,
}

#[derive(Debug, Args)]
struct LrvArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// One of dk, dk-pw, a91, a91-pw, nw87, kvb, ewc (or ewc:B).
    #[arg(long)]
    method: String,
}

#[derive(Debug, Args)]
struct TtestArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    method: String,
    /// Null value of the mean.
    #[arg(long, default_value_t = 0.0)]
    beta0: f64,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KvbReference {
    FixedBSim,
    StdNormal,
}

#[derive(Debug, Args)]
struct DmtestArgs {
    /// Two-column loss CSV (model 1, model 2).
    #[arg(long, conflicts_with = "design")]
    losses: Option<PathBuf>,
    /// Simulated design DM1..DM4.
    #[arg(long)]
    design: Option<String>,
    #[arg(long = "T", short = 'T', default_value_t = 200)]
    t_len: usize,
    /// Alternative strength; 0 selects the null design.
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, value_enum, default_value_t = KvbReference::FixedBSim)]
    kvb_reference: KvbReference,
}

#[derive(Debug, Args)]
struct McArgs {
    /// table1..table5 or table6_1..table6_4.
    #[arg(long)]
    table: String,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write a comparison against the shipped reference table to this path (JSON).
    #[arg(long)]
    compare: Option<PathBuf>,
    #[arg(long, default_value_t = 0.03)]
    size_tol: f64,
    #[arg(long, default_value_t = 0.10)]
    power_tol: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Diagnose(a) => commands::diagnose(a),
        Command::Lrv(a) => commands::lrv(a),
        Command::Ttest(a) => commands::ttest(a),
        Command::Dmtest(a) => commands::dmtest(a),
        Command::Mc(a) => commands::mc(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
