//! `fairbench`: evaluate prediction logs, compare methods against a
//! baseline, and render ranked fairness tables, threshold sweeps, and HF
//! isoline grids.

mod cmd;
mod load;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fairbench_core::{SweepMetric, TableFormat};

#[derive(Parser)]
#[command(name = "fairbench", version, about = "Group-fairness benchmarking over prediction logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the per-group metric profile of one prediction log
    Evaluate(EvaluateArgs),
    /// Compare a method log against a baseline log
    Compare(CompareArgs),
    /// Evaluate every method in a manifest and emit a ranked table
    Rank(RankArgs),
    /// Sweep the success threshold and emit per-method landmark curves
    Sweep(SweepArgs),
    /// Emit the HF isoline grid around the manifest's baseline
    Isolines(IsolinesArgs),
    /// Pick the best checkpoint from a validation history log
    Select(SelectArgs),
    /// Generate a synthetic prediction log from a spec file
    Synth(SynthArgs),
}

#[derive(Args)]
struct EvaluateArgs {
    /// Prediction log (CSV or JSONL)
    log: PathBuf,
    /// Benchmark manifest (JSON)
    #[arg(long)]
    manifest: PathBuf,
    /// Threshold override: score threshold for classification logs, NME
    /// success threshold for landmark logs
    #[arg(long)]
    threshold: Option<f64>,
    /// Emit machine-readable JSON on stdout
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Baseline prediction log
    baseline: PathBuf,
    /// Method prediction log
    method: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Threshold override (see `evaluate`)
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for the rendered table (written as rank.<ext>)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format override
    #[arg(long)]
    format: Option<FormatArg>,
    /// Metric that orders the method rows
    #[arg(long, default_value = "sigma_hf")]
    key: KeyArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for sweep.csv and sweep.svg
    #[arg(long)]
    out: Option<PathBuf>,
    /// Threshold grid as start:stop:step, e.g. 0.01:0.10:0.005
    #[arg(long)]
    grid: Option<String>,
    /// Metric drawn on the SVG y axis
    #[arg(long, default_value = "sigma_hf")]
    key: KeyArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IsolinesArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for isolines.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cells per axis of the (min, max) grid
    #[arg(long, default_value_t = 101)]
    resolution: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SelectArgs {
    /// Validation history log carrying val-split records with checkpoints
    log: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Synthetic log spec (JSON)
    spec: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the generated log (synthetic.csv or synthetic.jsonl)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Md,
    Csv,
    Tsv,
}

impl From<FormatArg> for TableFormat {
    fn from(arg: FormatArg) -> TableFormat {
        match arg {
            FormatArg::Md => TableFormat::Markdown,
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Tsv => TableFormat::Tsv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KeyArg {
    #[value(name = "sigma_hf")]
    SigmaHf,
    #[value(name = "delta_dto")]
    DeltaDto,
}

impl KeyArg {
    fn metric_key(self) -> &'static str {
        match self {
            KeyArg::SigmaHf => "sigma_hf",
            KeyArg::DeltaDto => "delta_dto",
        }
    }

    fn sweep_metric(self) -> SweepMetric {
        match self {
            KeyArg::SigmaHf => SweepMetric::SigmaHf,
            KeyArg::DeltaDto => SweepMetric::DeltaDto,
        }
    }
}

/// Failures split by who has to act: bad inputs exit 1, everything that
/// indicates a bug or environment problem exits 2.
#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError::Internal(message.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                // --help and --version are successes, not usage errors.
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Evaluate(args) => cmd::evaluate(args),
        Command::Compare(args) => cmd::compare(args),
        Command::Rank(args) => cmd::rank(args),
        Command::Sweep(args) => cmd::sweep(args),
        Command::Isolines(args) => cmd::isolines(args),
        Command::Select(args) => cmd::select(args),
        Command::Synth(args) => cmd::synth(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
