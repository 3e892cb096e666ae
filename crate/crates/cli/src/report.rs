use serde::Serialize;

use gpcg::{BearingSpec, SolveOutcome, SolveStatus, SolverConfig, SolverStats};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum ProblemInfo {
    Bearing {
        n: usize,
        nx: usize,
        ny: usize,
        eps: f64,
        b_dom: f64,
    },
    File {
        n: usize,
        manifest: String,
    },
}

impl ProblemInfo {
    pub fn bearing(spec: &BearingSpec) -> Self {
        ProblemInfo::Bearing { n: spec.n(), nx: spec.nx, ny: spec.ny, eps: spec.eps, b_dom: spec.b_dom }
    }

    pub fn n(&self) -> usize {
        match self {
            ProblemInfo::Bearing { n, .. } | ProblemInfo::File { n, .. } => *n,
        }
    }
}

/// Everything a single solve reports: the configuration it ran with, what it solved and how.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub problem: ProblemInfo,
    pub config: SolverConfig,
    pub precond: String,
    pub blocks: usize,
    pub status: SolveStatus,
    pub stats: SolverStats,
    pub cg_time_percent: f64,
}

impl RunReport {
    pub fn new(problem: ProblemInfo, config: &SolverConfig, outcome: &SolveOutcome) -> Self {
        Self {
            problem,
            config: config.clone(),
            precond: config.precond.to_string(),
            blocks: config.blocks,
            status: outcome.status.clone(),
            stats: outcome.stats.clone(),
            cg_time_percent: outcome.stats.cg_time_percent(),
        }
    }

    pub const CSV_HEADER: &'static str = "n,nx,ny,eps,precond,blocks,status,outer_iters,gp_iters_total,cg_iters_total,\
        cg_calls,faces_visited,free_fraction_final,final_pg_norm,objective_final,wall_time_seconds,cg_time_percent";

    pub fn csv_row(&self) -> String {
        let (nx, ny, eps) = match &self.problem {
            ProblemInfo::Bearing { nx, ny, eps, .. } => (nx.to_string(), ny.to_string(), eps.to_string()),
            ProblemInfo::File { .. } => (String::new(), String::new(), String::new()),
        };
        let status = match &self.status {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxOuterReached => "max_outer_reached",
            SolveStatus::Failed(_) => "failed",
        };
        let s = &self.stats;
        format!(
            "{},{nx},{ny},{eps},{},{},{status},{},{},{},{},{},{},{:e},{:e},{:.6},{:.2}",
            self.problem.n(),
            self.precond,
            self.blocks,
            s.outer_iters,
            s.gp_iters_total,
            s.cg_iters_total,
            s.cg_calls,
            s.faces_visited,
            s.free_fraction_final,
            s.final_pg_norm,
            s.objective_final,
            s.wall_time_seconds,
            self.cg_time_percent,
        )
    }
}

pub fn csv_table(reports: &[RunReport]) -> String {
    let mut out = String::from(RunReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub fn trace_csv(outcome: &SolveOutcome) -> String {
    let mut out = String::from(gpcg::solver::TRACE_HEADER);
    out.push('\n');
    for r in &outcome.trace {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
