//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "markov-ot", version, about = "Discounted optimal transport distances between Markov chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two chains.
    Dist(DistArgs),
    /// Pairwise distance matrix over a directory of chain files.
    Matrix(MatrixArgs),
    /// Runtime and accuracy table over random instances.
    Bench(BenchArgs),
    /// Check chain files, or a coupling against two chains.
    Validate(ValidateArgs),
    /// Write the occupancy-coupling linear program.
    ExportLp(ExportLpArgs),
    /// Generate a chain file.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Svi,
    Spi,
    Exact,
    Dwl,
    Eotc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Const,
    Invsqrt,
    Theory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AveragingArg {
    Last,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    None,
    OneMinusGamma,
}

/// Inner Bellman–Sinkhorn steps: a positive count or `inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerM {
    Steps(usize),
    Converge,
}

fn parse_inner_m(s: &str) -> Result<InnerM, String> {
    match s {
        "inf" | "infinity" | "∞" => Ok(InnerM::Converge),
        _ => match s.parse::<usize>() {
            Ok(0) => Err("must be at least 1".into()),
            Ok(m) => Ok(InnerM::Steps(m)),
            Err(_) => Err(format!("expected a positive integer or `inf`, got `{s}`")),
        },
    }
}

/// Solver selection and tuning, shared by every solving subcommand.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "svi")]
    pub algo: AlgoArg,
    /// Discount factor.
    #[arg(long, default_value_t = 0.95)]
    pub gamma: f64,
    /// Step-size constant: `eta` itself for `const`, `c0` in `c0 / sqrt(k)`
    /// for `invsqrt`. Ignored by `theory`.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value = "invsqrt")]
    pub eta_schedule: ScheduleArg,
    /// Outer iterations K.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Inner steps per iteration: a count, or `inf` to solve to tolerance.
    #[arg(long, value_parser = parse_inner_m, default_value = "inf")]
    pub inner_m: InnerM,
    #[arg(long, default_value_t = 1e-10)]
    pub inner_tol: f64,
    #[arg(long, value_enum, default_value = "last")]
    pub averaging: AveragingArg,
    /// Accuracy of the exact oracle.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Stop SVI/SPI early once the iterates settle to this tolerance.
    #[arg(long)]
    pub early_stop: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Entropic strength of the baselines' inner Sinkhorn solves.
    #[arg(long, default_value_t = 50.0)]
    pub inner_eta: f64,
    /// Sweeps of each baseline inner Sinkhorn solve.
    #[arg(long, default_value_t = 100)]
    pub inner_iters: usize,
    /// Warm-start the baselines' inner Sinkhorn solves.
    #[arg(long)]
    pub warm_start: bool,
    /// Evaluation sweeps per improvement step of the `eotc` baseline.
    #[arg(long, default_value_t = 5)]
    pub eval_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Chain file for X.
    #[arg(long)]
    pub x: PathBuf,
    /// Chain file for Y.
    #[arg(long)]
    pub y: PathBuf,
    /// Cost spec file; absolute label differences when omitted.
    #[arg(long)]
    pub cost: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Write per-iteration diagnostics CSV here.
    #[arg(long)]
    pub diagnostics: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Directory of chain files (`*.json`); ids are the file stems.
    #[arg(long)]
    pub dir: PathBuf,
    /// Scale of the absolute label-difference cost.
    #[arg(long, value_enum, default_value = "none")]
    pub cost_scale: ScaleArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Random instances per size.
    #[arg(long, default_value_t = 3)]
    pub instances: usize,
    /// Chain sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
    pub sizes: Vec<usize>,
    /// Algorithms, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [AlgoArg::Svi, AlgoArg::Spi, AlgoArg::Exact])]
    pub algos: Vec<AlgoArg>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Chain files to check.
    #[arg(long = "chain")]
    pub chains: Vec<PathBuf>,
    /// Transition coupling file, checked against `--x` and `--y`.
    #[arg(long, requires_all = ["x", "y"])]
    pub coupling: Option<PathBuf>,
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Marginal tolerance for couplings.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ExportLpArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 0.95)]
    pub gamma: f64,
    #[arg(long)]
    pub out: PathBuf,
}

/// A grid cell written `row,col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellArg(pub usize, pub usize);

fn parse_cell(s: &str) -> Result<CellArg, String> {
    let (r, c) = s.split_once(',').ok_or_else(|| format!("expected `row,col`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok(CellArg(parse(r)?, parse(c)?))
}

/// A reward written `row,col=value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardArg(pub CellArg, pub f64);

fn parse_reward(s: &str) -> Result<RewardArg, String> {
    let (cell, value) = s.split_once('=').ok_or_else(|| format!("expected `row,col=value`, got `{s}`"))?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("`{value}`: {e}"))?;
    Ok(RewardArg(parse_cell(cell)?, value))
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random walk on a grid.
    Grid {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        /// Wall cell `row,col`; repeatable.
        #[arg(long = "wall", value_parser = parse_cell)]
        walls: Vec<CellArg>,
        #[arg(long, value_parser = parse_cell, default_value = "0,0")]
        init: CellArg,
        /// Reward `row,col=value`; repeatable.
        #[arg(long = "reward", value_parser = parse_reward)]
        rewards: Vec<RewardArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Four rooms joined by doors in the middle of each wall segment.
    FourRooms {
        #[arg(long, default_value_t = 5)]
        room_size: usize,
        /// Close every door.
        #[arg(long)]
        no_doors: bool,
        #[arg(long, value_parser = parse_cell, default_value = "0,0")]
        init: CellArg,
        #[arg(long = "reward", value_parser = parse_reward)]
        rewards: Vec<RewardArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random chain with uniform labels.
    Random {
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
