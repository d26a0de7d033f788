mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, exit code 3.
    Input(String),
    /// A precondition of the mathematics failed, exit code 2.
    Contract(String),
}

impl CliError {
    pub fn with_context(self, ctx: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{ctx}: {m}")),
            CliError::Contract(m) => CliError::Contract(format!("{ctx}: {m}")),
        }
    }
}

impl From<selectorkit::Error> for CliError {
    fn from(e: selectorkit::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Contract(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "selectorkit", version, about = "Constructive selectors of set-valued maps")]
pub struct Cli {
    /// Directory receiving artifacts and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for every randomized probe.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Countable reduction of a set sequence with its measure report.
    Reduce(ReduceArgs),
    /// Selector chain of a set-valued map.
    Extract(ExtractArgs),
    /// Evaluates the last selector of a chain.
    Eval(EvalArgs),
    /// Filippov iteration for a differential inclusion.
    SolveDi(SolveDiArgs),
    /// Nonholonomic integrator demo.
    #[command(subcommand)]
    Robot(RobotCommand),
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    pub sets: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    pub svf: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    /// Domain-loss budget ε_dom, a dyadic such as `1/64` or a decimal.
    #[arg(long, default_value = "1/64")]
    pub dom_budget: String,
    /// Sample points per free axis of the section dump.
    #[arg(long, default_value_t = 64)]
    pub section_res: usize,
    /// Section coordinates, one per axis, `_` for a free axis (`_,0.5`).
    /// Defaults to the first two axes free and the rest at the centre.
    #[arg(long)]
    pub fix: Option<String>,
    /// Random probes for the weak-continuity check.
    #[arg(long, default_value_t = 256)]
    pub probes: usize,
    /// Grid resolution per axis of the weak-continuity check.
    #[arg(long)]
    pub check_res: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub chain: PathBuf,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub at: String,
    #[arg(long, default_value = "1/64")]
    pub dom_budget: String,
}

#[derive(Args, Debug)]
pub struct SolveDiArgs {
    pub problem: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum RobotCommand {
    /// Closed-loop simulation.
    Sim(SimArgs),
    /// Samples the disassembled subgradients into a map file.
    ExportSvf(ExportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerKind {
    Analytic,
    Selector,
}

#[derive(Args, Debug)]
pub struct SimArgs {
    #[arg(long, value_enum, default_value = "analytic")]
    pub controller: ControllerKind,
    #[arg(long, allow_hyphen_values = true, default_value = "1,1,1")]
    pub x0: String,
    #[arg(long, default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 10)]
    pub substeps: usize,
    /// Chain JSON to use instead of exporting and extracting one.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Grid step of the exported map when no chain is given.
    #[arg(long, default_value_t = 0.125)]
    pub res: f64,
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    #[arg(long, default_value = "1/1024")]
    pub dom_budget: String,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[arg(long, default_value_t = 0.125)]
    pub res: f64,
    #[arg(long, default_value_t = 2.0)]
    pub half_width: f64,
}

fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var("SELECTORKIT_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Input(format!("SELECTORKIT_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = threads_from_env()?;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Contract(e.to_string()))?;
    }
    commands::dispatch(&cli, threads)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(CliError::Contract(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
