mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qtoric::engines::Engine;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Verification(String),
    SizeCap(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 3,
            CliError::SizeCap(_) => 4,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::SizeCap(m) => write!(f, "{m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<qtoric::Error> for CliError {
    fn from(e: qtoric::Error) -> Self {
        use qtoric::Error as E;
        match e {
            E::InvalidArgument(_) | E::LevelMismatch(..) => CliError::Config(e.to_string()),
            E::SizeCap { .. } => CliError::SizeCap(e.to_string()),
            E::Unsupported(_) => CliError::SizeCap(e.to_string()),
            E::Verification(_) => CliError::Verification(e.to_string()),
            E::Numerical(_) => CliError::Other(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "qtoric", version, about = "Thermal decay of loop operators in qudit toric codes")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Rate R(0) for zero-energy processes.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Rate R+ for energy-lowering processes.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub engine: Option<Engine>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long)]
    pub t_stop: Option<f64>,
    #[arg(long)]
    pub t_count: Option<usize>,
    #[arg(long)]
    pub log_times: bool,
    #[arg(long)]
    pub loop_direction: Option<u8>,
    #[arg(long)]
    pub loop_offset: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Beta,
    D,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Algebra,
    Code,
    Processes,
    Davies,
    Engines,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral gap: closed form and exact diagonalization.
    Gap {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Energy levels with multiplicities.
    Spectrum {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Anyon processes and Bohr frequencies per error power.
    Processes {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Character orthogonality and commutant dimensions.
    Algebra {
        #[arg(long, default_value_t = 8)]
        d_max: u32,
    },
    /// Decay curve of the logical loop; writes CSV and a JSON manifest.
    Decay(RunArgs),
    /// Fitted vs closed-form decay rate along one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Temperature where the d-level rate meets the reference rate.
    Crossover {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 2)]
        versus: u32,
        /// Energy unit as a frequency in Hz, for a result in kelvin.
        #[arg(long)]
        e0_hz: Option<f64>,
    },
    /// Runs internal consistency checks; prints one JSON line per check.
    Verify {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("QTORIC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Config(format!("QTORIC_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Config("QTORIC_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Other(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.cmd {
        Command::Gap { d, k } => commands::gap(d, k),
        Command::Spectrum { d, k } => commands::spectrum(d, k),
        Command::Processes { d, k } => commands::processes(d, k),
        Command::Algebra { d_max } => commands::algebra(d_max),
        Command::Decay(args) => commands::decay(&args),
        Command::Sweep { run, axis, values } => commands::sweep(&run, axis, &values),
        Command::Crossover { d, versus, e0_hz } => commands::crossover(d, versus, e0_hz),
        Command::Verify { suite } => verify::run(suite),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qtoric: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
