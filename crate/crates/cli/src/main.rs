mod commands;
mod grid;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use grid::{Grid, Order, Range};

#[derive(Debug, Parser)]
#[command(name = "cliffpert", version, about = "Perturbative Pauli propagation for Clifford + rotation circuits")]
struct Cli {
    /// Worker threads for propagation (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compile a circuit into an interaction-picture program.
    Compile(CompileArgs),
    /// Truncated expectation value of an observable.
    Expval(ExpvalArgs),
    /// QAOA cost landscape on a random E3LIN2 instance.
    Qaoa(QaoaArgs),
    /// Histogram of the highest non-zero order over random E3LIN2 instances.
    QaoaOrders(QaoaOrdersArgs),
    /// Truncation error on layered Clifford-plus-small-angle circuits.
    Layers(LayersArgs),
    /// Smallest order whose absolute-series tail stays below δ.
    Orderbound(OrderboundArgs),
    /// Exact reference value from dense simulation.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    /// Observable, e.g. `ZIZ` or `Z1Z3` (1-based labels).
    #[arg(long)]
    pub observable: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Keep the original angles instead of folding them into (-π/4, π/4].
    #[arg(long)]
    pub no_angle_transform: bool,
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    /// Abort once the live term count exceeds this.
    #[arg(long, env = "CLIFFPERT_MAX_TERMS", default_value_t = cliffpert::propagate::DEFAULT_MAX_TERMS)]
    pub max_terms: usize,
    /// Drop terms with |c| below this after every rotation (approximate).
    #[arg(long, default_value_t = 0.0)]
    pub coeff_threshold: f64,
}

#[derive(Debug, Args)]
pub struct ExpvalArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub observable: String,
    /// Truncation order, or `full`.
    #[arg(long, default_value = "full")]
    pub order: Order,
    /// JSON list of noise channels.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Cutoff on powers of the amplitude-damping λ.
    #[arg(long)]
    pub max_damping_order: Option<usize>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub no_lightcone: bool,
    #[arg(long)]
    pub no_angle_transform: bool,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct QaoaArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long = "D", default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Load the instance from JSON instead of generating it.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub beta: f64,
    /// `a:b:steps` or a comma list.
    #[arg(long, allow_hyphen_values = true, default_value = "-1.5707963267948966:1.5707963267948966:30")]
    pub gamma_grid: Grid,
    /// Comma list of orders; `full` for no truncation.
    #[arg(long, default_value = "1,full", value_parser = grid::list::<Order>)]
    pub order: std::vec::Vec<Order>,
    /// Append a wall-time column (seconds per γ point).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct QaoaOrdersArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Comma list of degrees.
    #[arg(long = "D", default_value = "1,2,3,4,5", value_parser = grid::list::<usize>)]
    pub d: std::vec::Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub runs: u64,
    /// Instance `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct LayersArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Circuits `seed .. seed + runs`.
    #[arg(long, default_value_t = 1)]
    pub runs: u64,
    #[arg(long, allow_hyphen_values = true, default_value = "0.01,0.05,0.1")]
    pub dtheta_grid: Grid,
    #[arg(long, default_value = "0,1,2,3,4", value_parser = grid::list::<usize>)]
    pub order_grid: std::vec::Vec<usize>,
    #[arg(long, default_value = "Z1Z26")]
    pub observable: String,
    /// `exact` computes the untruncated value for the abs_error column.
    #[arg(long, default_value = "exact", value_parser = ["exact", "none"])]
    pub reference: String,
    /// Term limit for the exact reference; circuits exceeding it get an
    /// empty reference instead of failing.
    #[arg(long, default_value_t = 10_000_000)]
    pub reference_max_terms: usize,
    #[arg(long)]
    pub no_angle_transform: bool,
    #[command(flatten)]
    pub engine: EngineArgs,
}

#[derive(Debug, Args)]
pub struct OrderboundArgs {
    #[arg(long, default_value_t = 0.2)]
    pub theta: f64,
    #[arg(long, default_value = "0.01,0.05", value_parser = grid::list::<f64>)]
    pub delta_list: std::vec::Vec<f64>,
    /// `a:b` or `a:b:step`, inclusive.
    #[arg(long, default_value = "1:200")]
    pub n_range: Range,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub observable: String,
    /// Noise locations count rotations of the compiled program, as in `expval`.
    #[arg(long)]
    pub noise: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cliffpert::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Core(e) => json!({"error": e.kind(), "message": e.to_string()}),
            CliError::Io { path, source } => json!({"error": "io", "message": source.to_string(), "path": path}),
            CliError::Usage(m) => json!({"error": "usage", "message": m}),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io {
            path: "<stdout>".into(),
            source: e.into(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Compile(a) => commands::compile(&a),
        Command::Expval(a) => commands::expval(&a),
        Command::Qaoa(a) => commands::qaoa(&a),
        Command::QaoaOrders(a) => commands::qaoa_orders(&a),
        Command::Layers(a) => commands::layers(&a),
        Command::Orderbound(a) => commands::orderbound(&a),
        Command::Oracle(a) => commands::oracle(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
