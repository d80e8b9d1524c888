//! `sigma-series`: batch experiment runner over the `sigma_series` library.
//!
//! Exit codes: 0 on success, 1 on configuration errors (bad flags, bad config
//! file, unusable output directory, parameters outside a precondition), 2 when
//! a run detects an invariant violation or a failed acceptance criterion.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sigma_series::report::{json_report, VERSION};

use crate::config::{CommandKind, ExperimentConfig};

#[derive(Parser, Debug)]
#[command(
    name = "sigma-series",
    version,
    about = "Exact experiments on divisor-power factorial series"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV/JSON reports; nothing is written without it.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomized sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Sieve segment length.
    #[arg(long, global = true)]
    pub segment_size: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certified decimal expansion of S_k and its partial-sum table.
    Series(SeriesArgs),
    #[command(subcommand)]
    Sieve(SieveCommand),
    #[command(subcommand)]
    Poly(PolyCommand),
    #[command(subcommand)]
    Criteria(CriteriaCommand),
    #[command(subcommand)]
    Equidist(EquidistCommand),
    /// Run the acceptance suite and print one line per criterion.
    VerifyAll(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct RangeArgs {
    #[arg(long)]
    pub lo: Option<u64>,
    #[arg(long)]
    pub hi: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub precision: Option<u32>,
    /// Rows in the partial-sum table; defaults to the truncation index.
    #[arg(long)]
    pub terms: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum SieveCommand {
    Primes(RangeArgs),
    Lemma(LemmaArgs),
    Schinzel(SchinzelArgs),
    Composite(CompositeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Mode {
    RangeTop,
    PerElement,
}

#[derive(Args, Debug)]
pub struct LemmaArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long, default_value = "1/9")]
    pub exponent: String,
    #[arg(long, value_enum, default_value = "range-top")]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct SchinzelArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Args, Debug)]
pub struct CompositeArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub p: u64,
}

#[derive(Subcommand, Debug)]
pub enum PolyCommand {
    /// Quotient and remainder of (x+i-1)^k by the falling factorial.
    Derive(PolyArgs),
}

#[derive(Args, Debug)]
pub struct PolyArgs {
    #[arg(long)]
    pub k: Option<u32>,
    /// A single i; all of 1..=k when omitted.
    #[arg(long)]
    pub i: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum CriteriaCommand {
    Eq1(PatternArgs),
    Eq2(Eq2Args),
    Endgame(EndgameArgs),
    Sigma3(WindowArgs),
    ConditionI(ConditionArgs),
    Subset(SubsetArgs),
    SmallK(SmallKArgs),
}

#[derive(Args, Debug)]
pub struct PatternArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub epsilon: Option<String>,
}

#[derive(Args, Debug)]
pub struct Eq2Args {
    #[command(flatten)]
    pub pattern: PatternArgs,
    #[arg(long)]
    pub p: u64,
}

#[derive(Args, Debug)]
pub struct EndgameArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub p: u64,
    #[arg(long, required = true, num_args = 1..)]
    pub q1: Vec<u64>,
    #[arg(long)]
    pub epsilon: Option<String>,
}

#[derive(Args, Debug)]
pub struct WindowArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long)]
    pub epsilon: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Shift {
    None,
    Plus,
    Minus,
    /// +1/4 for n ≡ 1 (mod 4), −1/4 for n ≡ 3 (mod 4), none for even n.
    Auto,
}

#[derive(Args, Debug)]
pub struct ConditionArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    /// Constant c; defaults to the calibrated value.
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long, value_enum, default_value = "none")]
    pub shift: Shift,
}

#[derive(Args, Debug)]
pub struct SubsetArgs {
    #[arg(long)]
    pub n: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Kind {
    K1,
    K2,
}

#[derive(Args, Debug)]
pub struct SmallKArgs {
    #[command(flatten)]
    pub range: RangeArgs,
    #[arg(long, value_enum, default_value = "k1")]
    pub kind: Kind,
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum EquidistCommand {
    /// Discrepancy, Erdős–Turán and van der Corput tables for one sequence.
    Run(EquidistRunArgs),
    /// Random factor tuples turned into sequences.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlphaFactor {
    Include,
    Omit,
}

#[derive(Args, Debug)]
pub struct EquidistRunArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub y: u64,
    /// Defaults to y+1, the interval [y, 2y].
    #[arg(long)]
    pub length: Option<u64>,
    #[arg(long, default_value_t = 50)]
    pub h: u64,
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    #[arg(long, value_enum, default_value = "include")]
    pub alpha_factor: AlphaFactor,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub x: u64,
    #[arg(long, default_value_t = 3)]
    pub factors: usize,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 32)]
    pub h_cap: u64,
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// The reduced-range subset.
    #[arg(long)]
    pub quick: bool,
    /// Multiplier on every empirically fixed tolerance.
    #[arg(long, default_value = "1")]
    pub tolerance_scale: String,
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Invariant(Vec<String>),
}

impl From<sigma_series::Error> for Failure {
    fn from(e: sigma_series::Error) -> Self {
        match e {
            sigma_series::Error::Unstable(_) => Failure::Invariant(vec![e.to_string()]),
            other => Failure::Config(other.to_string()),
        }
    }
}

/// Files and stdout text produced by one command.
#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, String)>,
    pub violations: Vec<String>,
}

/// Settings shared by every command after merging the config file and flags.
#[derive(Debug, Clone)]
pub struct Context {
    pub file: ExperimentConfig,
    pub seed: u64,
    pub segment_size: Option<u64>,
}

impl Context {
    /// The config as embedded in reports: command name, resolved parameters
    /// and seed. Output location and worker count do not affect results and
    /// are left out so reports compare byte-for-byte across machines.
    pub fn embed(&self, command: &str, params: Value) -> Value {
        json!({"command": command, "params": params, "seed": self.seed})
    }

    pub fn report(
        &self,
        config: &Value,
        payload: &impl serde::Serialize,
    ) -> Result<String, Failure> {
        Ok(json_report(config, payload)?)
    }
}

fn expected_kind(command: &Command) -> &'static [CommandKind] {
    match command {
        Command::Series(_) => &[CommandKind::Series],
        Command::Sieve(SieveCommand::Schinzel(_) | SieveCommand::Composite(_)) => {
            &[CommandKind::Sieve, CommandKind::Constellations]
        }
        Command::Sieve(_) => &[CommandKind::Sieve],
        Command::Poly(_) | Command::Criteria(_) => &[CommandKind::Criteria],
        Command::Equidist(_) => &[CommandKind::Equidist],
        Command::VerifyAll(_) => &[CommandKind::Report],
    }
}

fn prepare_output_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot use output dir {}: {e}", dir.display())))?;
    if !dir.is_dir() {
        return Err(Failure::Config(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    Ok(())
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<(), Failure> {
    for (name, contents) in files {
        let path = dir.join(name);
        eprintln!("writing {}", path.display());
        std::fs::write(&path, contents)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.global.config {
        Some(path) => ExperimentConfig::load(path).map_err(Failure::Config)?,
        None => ExperimentConfig::default(),
    };
    if let Some(kind) = file.command {
        if !expected_kind(&cli.command).contains(&kind) {
            return Err(Failure::Config(format!(
                "config command {kind:?} does not match the requested subcommand"
            )));
        }
    }
    let workers = cli.global.workers.or(file.workers);
    if workers == Some(0) {
        return Err(Failure::Config("workers must be >= 1".into()));
    }
    if let Some(n) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let output_dir = cli
        .global
        .output_dir
        .clone()
        .or_else(|| file.output_dir.clone());
    if let Some(dir) = &output_dir {
        prepare_output_dir(dir)?;
    }
    let ctx = Context {
        seed: cli.global.seed.or(file.seed).unwrap_or(0),
        segment_size: cli
            .global
            .segment_size
            .or(file.range.map(|r| r.segment_size)),
        file,
    };
    let out = commands::dispatch(&cli.command, &ctx)?;
    if let Some(dir) = &output_dir {
        write_files(dir, &out.files)?;
    }
    print!("{}", out.stdout);
    if out.violations.is_empty() {
        return Ok(());
    }
    if let Some(dir) = &output_dir {
        let body = json_report(
            &json!({"version": VERSION}),
            &json!({"violations": out.violations}),
        )
        .map_err(|e| Failure::Config(e.to_string()))?;
        write_files(dir, &[("violations.json".into(), body)])?;
    }
    Err(Failure::Invariant(out.violations))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(violations)) => {
            for v in &violations {
                eprintln!("invariant violation: {v}");
            }
            ExitCode::from(2)
        }
    }
}
