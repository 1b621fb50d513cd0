//! Command-line experiment runner.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 validation error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cfr::{self, CfrConfig, UpdateMode};
use crate::efg::Game;
use crate::error::Error;
use crate::estimator::{EstimatorKind, TreeConfig};
use crate::eval;
use crate::games::{GameId, MatrixGame};
use crate::io;
use crate::rcfr::{self, RcfrConfig, TargetMode};
use crate::regret::{self, NoiseModel, RrmConfig};

pub const STRATEGY_FILE: &str = "strategy.txt";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

#[derive(Debug, Parser)]
#[command(name = "fregret", version, about = "Regret-based equilibrium solvers for Kuhn and Leduc poker")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a game with CFR or regression CFR; writes strategy.txt and convergence.csv.
    Solve(SolveArgs),
    /// Print the exploitability of a strategy file.
    Exploit(ExploitArgs),
    /// Evaluate two strategy files head to head.
    Compete(CompeteArgs),
    /// Regression regret-matching self-play on a matrix game with injected noise.
    Rrm(RrmArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Kuhn,
    Leduc,
}

impl From<GameArg> for GameId {
    fn from(g: GameArg) -> GameId {
        match g {
            GameArg::Kuhn => GameId::Kuhn,
            GameArg::Leduc => GameId::Leduc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Cfr,
    Rcfr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Tabular,
    Tree,
    Ensemble,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Exact,
    Bootstrap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UpdateArg {
    Simultaneous,
    Alternating,
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub game: GameArg,
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: u64,
    #[arg(long, value_enum, default_value = "tree")]
    pub estimator: EstimatorArg,
    #[arg(long, default_value_t = 1.0)]
    pub min_leaf: f64,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    pub target_mode: TargetArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub refit_every: u64,
    #[arg(long, default_value_t = 10)]
    pub ensemble_trees: usize,
    #[arg(long, value_enum, default_value = "simultaneous")]
    pub update: UpdateArg,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub log_every: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record wall-clock time in the log; otherwise wall_ms is 0 and output is reproducible.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct ExploitArgs {
    #[arg(long, value_enum)]
    pub game: GameArg,
    #[arg(long)]
    pub strategy: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct CompeteArgs {
    #[arg(long, value_enum)]
    pub game: GameArg,
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub hands: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub duplicate: bool,
    /// Print the exact expected value instead of sampling.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, clap::Args)]
pub struct RrmArgs {
    /// rps or biased_mp.
    #[arg(long, default_value = "rps")]
    pub game: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub iters: u64,
    /// Noise magnitude per unit of average regret, in multiples of the utility range.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long)]
    pub gaussian: bool,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub seeds: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub log_every: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Validation(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => CliError::Io(e.to_string()),
            Error::InvalidArgument(m) => CliError::Usage(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load(game: &Game, path: &Path) -> Result<crate::efg::StrategyProfile, CliError> {
    let text = read_file(path)?;
    io::read_strategy(game, &text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{e}").map_err(|e| CliError::Io(e.to_string()))?;
                return Ok(());
            }
            return Err(CliError::Usage(e.render().to_string()));
        }
    };
    let out = match cli.command {
        Command::Solve(args) => cmd_solve(&args)?,
        Command::Exploit(args) => cmd_exploit(&args)?,
        Command::Compete(args) => cmd_compete(&args)?,
        Command::Rrm(args) => cmd_rrm(&args)?,
    };
    stdout.write_all(out.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    match run(args, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message().trim_end());
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn cmd_solve(args: &SolveArgs) -> Result<String, CliError> {
    if args.min_leaf.is_nan() || args.min_leaf < 0.0 {
        return Err(CliError::Usage("--min-leaf must be nonnegative".into()));
    }
    let id = GameId::from(args.game);
    let game = id.build();
    let (profile, csv) = match args.algo {
        Algo::Cfr => {
            let config = CfrConfig {
                iterations: args.iters,
                update_mode: match args.update {
                    UpdateArg::Simultaneous => UpdateMode::Simultaneous,
                    UpdateArg::Alternating => UpdateMode::Alternating,
                },
                log_every: args.log_every,
            };
            let (profile, log) = cfr::solve(&game, &config)?;
            (profile, io::cfr_csv(&log, args.timing))
        }
        Algo::Rcfr => {
            let tree = TreeConfig {
                min_leaf_weight: args.min_leaf,
                max_depth: args.max_depth,
            };
            let estimator = match args.estimator {
                EstimatorArg::Tabular => EstimatorKind::Tabular,
                EstimatorArg::Tree => EstimatorKind::Tree(tree),
                EstimatorArg::Ensemble => EstimatorKind::Ensemble {
                    tree,
                    n_trees: args.ensemble_trees,
                    seed: args.seed,
                },
            };
            let config = RcfrConfig {
                iterations: args.iters,
                estimator,
                target_mode: match args.target_mode {
                    TargetArg::Exact => TargetMode::Exact,
                    TargetArg::Bootstrap => TargetMode::Bootstrap,
                },
                refit_every: args.refit_every,
                log_every: args.log_every,
                seed: args.seed,
            };
            let (profile, log) = rcfr::rcfr_solve(&game, &config)?;
            (profile, io::rcfr_csv(&log, args.timing))
        }
    };
    fs::create_dir_all(&args.out).map_err(|e| io_err(&args.out, e))?;
    let strategy_path = args.out.join(STRATEGY_FILE);
    write_file(&strategy_path, &io::write_strategy(id.as_str(), &profile))?;
    write_file(&args.out.join(CONVERGENCE_FILE), &csv)?;
    Ok(format!("wrote {}\n", args.out.display()))
}

pub fn cmd_exploit(args: &ExploitArgs) -> Result<String, CliError> {
    let game = GameId::from(args.game).build();
    let profile = load(&game, &args.strategy)?;
    let value = eval::exploitability(&game, &profile)?;
    Ok(format!("exploitability,{}\n", io::fmt_f64(value)))
}

pub fn cmd_compete(args: &CompeteArgs) -> Result<String, CliError> {
    let id = GameId::from(args.game);
    for path in [&args.a, &args.b] {
        let named = io::strategy_game_id(&read_file(path)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        if named != id.as_str() {
            return Err(CliError::Validation(format!(
                "{} is a {named} strategy but --game is {id}",
                path.display()
            )));
        }
    }
    let game = id.build();
    let a = load(&game, &args.a)?;
    let b = load(&game, &args.b)?;
    if args.exact {
        let ev = eval::exact_ev(&game, &a, &b)?;
        return Ok(format!("exact_ev\n{}\n", io::fmt_f64(ev)));
    }
    let result = eval::sampled_match(&game, &a, &b, args.hands, args.seed, args.duplicate)?;
    Ok(io::match_csv(&result))
}

pub fn cmd_rrm(args: &RrmArgs) -> Result<String, CliError> {
    let game = MatrixGame::named(&args.game)?;
    if args.epsilon.is_nan() || args.epsilon < 0.0 {
        return Err(CliError::Usage("--epsilon must be nonnegative".into()));
    }
    let magnitude = args.epsilon * game.utility_range();
    let noise = if args.gaussian {
        NoiseModel::Gaussian(magnitude)
    } else {
        NoiseModel::BoundedLinf(magnitude)
    };
    let mut rows = Vec::new();
    for seed in 0..args.seeds {
        rows.extend(regret::rrm_self_play(&game, args.iters, &RrmConfig::exact(noise, seed), args.log_every)?);
    }
    let csv = io::rrm_csv(&rows);
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(csv),
    }
}
