//! Batch driver for verification suites, convergence experiments and the
//! null-set perturbation demonstration.
//!
//! Every subcommand produces one [`Table`]; `run` renders it as CSV or
//! structured JSON and writes it to `--out` (atomically) or stdout.
//! Exit codes: 0 success, 1 verification failure, 2 usage or config error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use linfqmc::instance::{parse_instances, Instance};
use linfqmc::points::DEFAULT_ENUMERATION_CAP;

pub mod bounds;
pub mod convergence;
pub mod perturb;
pub mod table;
pub mod verify;

pub use table::{Table, Value};

#[derive(Debug, Parser)]
#[command(name = "linfqmc", version, about = "Worst-case error bounds for uniform point sets")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Instance file (JSON object or array).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Largest number of configurations an exhaustive check may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            config: None,
            out: None,
            format: Format::Csv,
            seed: 0,
            workers: Some(1),
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustively verify the bounds on finite instances.
    Verify(verify::VerifyArgs),
    /// Print the bound set, or the bound report when a point set is given.
    Bounds(bounds::BoundsArgs),
    /// Track the bounds under dyadic refinement of [0,1).
    Convergence(convergence::ConvergenceArgs),
    /// Compare bounds before and after adding spikes on a null set.
    Perturb(perturb::PerturbArgs),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("bound violated: {0}")]
    Violation(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Violation(_) => 1,
            RunError::Config(_) | RunError::Io(_) => 2,
        }
    }
}

impl From<linfqmc::Error> for RunError {
    fn from(e: linfqmc::Error) -> Self {
        match e {
            linfqmc::Error::BoundViolation { .. } => RunError::Violation(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

/// Result of one subcommand before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    /// Lines for stderr, such as the verify summary and replay descriptors.
    pub diagnostics: Vec<String>,
    pub failed: bool,
}

impl Outcome {
    pub fn ok(table: Table) -> Self {
        Outcome {
            table,
            diagnostics: Vec::new(),
            failed: false,
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, RunError> {
    let workers = cli
        .common
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(RunError::Config("--workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let common = Common {
        workers: Some(workers),
        ..cli.common.clone()
    };
    pool.install(|| match &cli.command {
        Command::Verify(a) => verify::run(&common, a),
        Command::Bounds(a) => bounds::run(&common, a),
        Command::Convergence(a) => convergence::run(&common, a),
        Command::Perturb(a) => perturb::run(&common, a),
    })
}

/// Parses `args`, runs the subcommand, writes its output and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        let bytes = outcome.table.render(cli.common.format)?;
        table::emit(&bytes, cli.common.out.as_deref())?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for line in &outcome.diagnostics {
                eprintln!("{line}");
            }
            i32::from(outcome.failed)
        }
        Err(e) => {
            eprintln!("linfqmc: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn read_config(path: &Path) -> Result<Vec<Instance>, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    let files = parse_instances(&text).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    if files.is_empty() {
        return Err(RunError::Config(format!("{}: no instances", path.display())));
    }
    files
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.build()
                .map_err(|e| RunError::Config(format!("{} instance {i}: {e}", path.display())))
        })
        .collect()
}

pub(crate) fn row_bounds(b: &linfqmc::BoundSet) -> [Value; 3] {
    [
        b.span_distance_bound.into(),
        b.max_oscillation.into(),
        b.weighted_oscillation.into(),
    ]
}
