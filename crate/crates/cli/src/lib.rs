//! Command-line front end for the `gpcg` solver.
//!
//! Exit codes: `0` when the solve converged, `1` when the solver failed or hit its
//! iteration limit, `2` for usage errors and unreadable or malformed input.

pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use gpcg::bearing::generate;
use gpcg::io::{load_problem, read_vector, save_problem, write_vector_text};
use gpcg::{solve, BearingSpec, BoundQP, GpcgError, PreconditionerSpec, SolveOutcome, SolveStatus, SolverConfig};

pub use report::{ProblemInfo, RunReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_SOLVER: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "gpcg", version, about = "Bound-constrained convex QP solver (gradient projection + conjugate gradients)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate and solve the journal bearing problem.
    Bearing {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve a problem described by a JSON manifest.
    Solve {
        manifest: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Solve one bearing problem with each of several preconditioners.
    ComparePreconds {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated preconditioner list.
        #[arg(long, value_delimiter = ',', default_value = "jacobi,bjacobi-ilu0,bjacobi-ilu2")]
        preconds: Vec<PreconditionerSpec>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        out: Format,
    },
    /// Write the bearing problem as a manifest bundle without solving it.
    Generate {
        #[command(flatten)]
        grid: GridArgs,
        /// Output directory; receives problem.json and the matrix and vector files.
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 100)]
    pub nx: usize,
    #[arg(long, default_value_t = 100)]
    pub ny: usize,
    /// Eccentricity in [0, 1).
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Domain half-height b.
    #[arg(long, default_value_t = BearingSpec::DEFAULT_B)]
    pub bdom: f64,
}

impl GridArgs {
    pub fn spec(&self) -> BearingSpec {
        BearingSpec { nx: self.nx, ny: self.ny, eps: self.eps, b_dom: self.bdom }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eta1: Option<f64>,
    /// Initial CG progress tolerance.
    #[arg(long)]
    pub eta2: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// `none`, `jacobi` or `bjacobi-ilu<k>`, optionally with a `:blocks=<p>` suffix.
    #[arg(long, default_value = "bjacobi-ilu2")]
    pub precond: PreconditionerSpec,
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Start refinement CG calls from the previous direction.
    #[arg(long)]
    pub warm_start_cg: bool,
}

impl SolverArgs {
    pub fn config(&self) -> Result<SolverConfig, CliError> {
        self.config_with(self.precond)
    }

    pub fn config_with(&self, precond: PreconditionerSpec) -> Result<SolverConfig, CliError> {
        let blocks = match (precond.blocks, self.blocks) {
            (Some(a), Some(b)) if a != b => {
                return Err(CliError::Usage(format!("--precond asks for {a} blocks but --blocks gives {b}")));
            }
            (a, b) => a.or(b).unwrap_or(1),
        };
        let d = SolverConfig::default();
        let cfg = SolverConfig {
            tau: self.tau.unwrap_or(d.tau),
            eta1: self.eta1.unwrap_or(d.eta1),
            eta2_init: self.eta2.unwrap_or(d.eta2_init),
            mu: self.mu.unwrap_or(d.mu),
            max_outer: self.max_outer.unwrap_or(d.max_outer),
            precond: precond.kind,
            blocks,
            warm_start_cg: self.warm_start_cg,
            ..d
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Starting point selection.
#[derive(Debug, Clone, PartialEq)]
pub enum StartPoint {
    /// The lower bound, with 0 where it is infinite.
    Lower,
    Zero,
    File(PathBuf),
}

impl FromStr for StartPoint {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "lower" => StartPoint::Lower,
            "zero" => StartPoint::Zero,
            path => StartPoint::File(PathBuf::from(path)),
        })
    }
}

impl StartPoint {
    pub fn resolve(&self, qp: &BoundQP) -> Result<Vec<f64>, CliError> {
        match self {
            StartPoint::Lower => Ok(qp.lower().iter().map(|&l| if l.is_finite() { l } else { 0.0 }).collect()),
            StartPoint::Zero => Ok(vec![0.0; qp.n()]),
            StartPoint::File(p) => {
                let x = read_vector(p).map_err(CliError::Input)?;
                if x.len() != qp.n() {
                    return Err(CliError::Usage(format!("{} holds {} values, problem has {}", p.display(), x.len(), qp.n())));
                }
                Ok(x)
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the per-iterate trace as CSV to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub out: Format,
    /// Starting point: `lower`, `zero` or a vector file.
    #[arg(long, default_value = "lower")]
    pub x0: StartPoint,
    /// Write the solution vector to this file.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(GpcgError),
    #[error("solver error: {0}")]
    Solver(GpcgError),
    #[error("cannot write {path:?}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => EXIT_USAGE,
            CliError::Solver(_) | CliError::Output { .. } => EXIT_SOLVER,
        }
    }
}

/// What a command printed and the exit code it maps to.
pub struct Completed {
    pub stdout: String,
    pub exit_code: u8,
}

fn status_exit(status: &SolveStatus) -> u8 {
    match status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxOuterReached | SolveStatus::Failed(_) => EXIT_SOLVER,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Output { path: path.to_path_buf(), source })
}

fn run_solve(qp: &BoundQP, problem: ProblemInfo, cfg: &SolverConfig, output: &OutputArgs) -> Result<Completed, CliError> {
    let x0 = output.x0.resolve(qp)?;
    let outcome: SolveOutcome = solve(qp, &x0, cfg).map_err(|e| match e {
        GpcgError::InvalidConfig(_) | GpcgError::DimensionMismatch { .. } | GpcgError::NonFinite { .. } => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Solver(other),
    })?;
    if let SolveStatus::Failed(reason) = &outcome.status {
        log::error!("solver failed: {reason}");
    }
    info!(
        "{:?} after {} outer iterations, ‖pg‖ = {:e}",
        outcome.status, outcome.stats.outer_iters, outcome.stats.final_pg_norm
    );
    if let Some(path) = &output.trace {
        write_file(path, &report::trace_csv(&outcome))?;
    }
    if let Some(path) = &output.solution {
        write_vector_text(path, &outcome.x_star).map_err(|e| CliError::Output {
            path: path.clone(),
            source: std::io::Error::other(e.to_string()),
        })?;
    }
    let report = RunReport::new(problem, cfg, &outcome);
    let stdout = match output.out {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Csv => report::csv_table(std::slice::from_ref(&report)),
    };
    Ok(Completed { stdout, exit_code: status_exit(&outcome.status) })
}

pub fn run(cli: &Cli) -> Result<Completed, CliError> {
    match &cli.command {
        Command::Bearing { grid, solver, output } => {
            let spec = grid.spec();
            let qp = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
            run_solve(&qp, ProblemInfo::bearing(&spec), &solver.config()?, output)
        }
        Command::Solve { manifest, solver, output } => {
            let qp = load_problem(manifest).map_err(CliError::Input)?;
            let info = ProblemInfo::File { n: qp.n(), manifest: manifest.display().to_string() };
            run_solve(&qp, info, &solver.config()?, output)
        }
        Command::ComparePreconds { grid, solver, preconds, out } => {
            let spec = grid.spec();
            let qp = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
            let configs = preconds.iter().map(|&p| solver.config_with(p)).collect::<Result<Vec<_>, _>>()?;
            let mut reports = Vec::with_capacity(configs.len());
            let mut exit_code = EXIT_OK;
            for cfg in &configs {
                let outcome = solve(&qp, qp.lower(), cfg).map_err(CliError::Solver)?;
                exit_code = exit_code.max(status_exit(&outcome.status));
                reports.push(RunReport::new(ProblemInfo::bearing(&spec), cfg, &outcome));
            }
            let stdout = match out {
                Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
                Format::Csv => report::csv_table(&reports),
            };
            Ok(Completed { stdout, exit_code })
        }
        Command::Generate { grid, dir } => {
            let qp = generate(&grid.spec()).map_err(|e| CliError::Usage(e.to_string()))?;
            let manifest = save_problem(&qp, dir).map_err(|e| CliError::Output {
                path: dir.clone(),
                source: std::io::Error::other(e.to_string()),
            })?;
            Ok(Completed { stdout: format!("{}\n", manifest.display()), exit_code: EXIT_OK })
        }
    }
}
