//! The outer GPCG iteration.
//!
//! Each outer iterate runs a gradient projection phase to pick a face, then minimizes over
//! that face with preconditioned CG and a projected search along the CG direction. While the
//! new point is on a face where every active variable is binding, the CG tolerance `η₂` is
//! tightened and CG is run again from that point.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::cg::{build_reduced, pcg_progress, CgTermination};
use crate::error::{check_len, GpcgError, Result};
use crate::gp::{gp_phase, projected_backtrack, GpParams, SearchStep};
use crate::linalg::{scatter, DenseVector, IndexSet};
use crate::precond::{Preconditioner, PreconditionerKind};
use crate::qp::BoundQP;

/// Cap on `η₂` refinements within one outer iterate.
pub const MAX_REFINEMENTS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Convergence tolerance on `‖∇_Ω q(x)‖₂`.
    pub tau: f64,
    /// Gradient projection progress tolerance.
    pub eta1: f64,
    /// CG progress tolerance at the start of each outer iterate.
    pub eta2_init: f64,
    pub eta2_shrink: f64,
    pub eta2_floor: f64,
    /// Sufficient decrease constant for both projected searches.
    pub mu: f64,
    pub max_outer: usize,
    pub gp_cap: usize,
    pub max_halvings: usize,
    pub precond: PreconditionerKind,
    pub blocks: usize,
    /// CG iteration limit per call; `None` means the reduced dimension.
    pub cg_maxiter: Option<usize>,
    /// Start refinement CG from the unused part of the previous direction instead of zero.
    pub warm_start_cg: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 1e-4,
            eta1: 0.1,
            eta2_init: 0.05,
            eta2_shrink: 0.1,
            eta2_floor: 1e-12,
            mu: 0.1,
            max_outer: 500,
            gp_cap: 100,
            max_halvings: 50,
            precond: PreconditionerKind::BlockJacobiIlu { fill: 2 },
            blocks: 1,
            cg_maxiter: None,
            warm_start_cg: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let open = |v: f64, hi: f64| v > 0.0 && v < hi;
        let problems = [
            (open(self.mu, 0.5), "mu must lie in (0, 0.5)"),
            (open(self.eta1, 1.0), "eta1 must lie in (0, 1)"),
            (open(self.eta2_init, 1.0), "eta2_init must lie in (0, 1)"),
            (open(self.eta2_shrink, 1.0), "eta2_shrink must lie in (0, 1)"),
            (self.eta2_floor > 0.0 && self.eta2_floor <= self.eta2_init, "eta2_floor must lie in (0, eta2_init]"),
            (self.tau > 0.0, "tau must be positive"),
            (self.gp_cap > 0, "gp_cap must be positive"),
            (self.blocks > 0, "blocks must be positive"),
            (self.cg_maxiter != Some(0), "cg_maxiter must be positive"),
        ];
        match problems.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(GpcgError::InvalidConfig((*msg).into())),
            None => Ok(()),
        }
    }

    fn gp_params(&self) -> GpParams {
        GpParams {
            eta1: self.eta1,
            mu: self.mu,
            tau: self.tau,
            cap: self.gp_cap,
            max_halvings: self.max_halvings,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Gp,
    Cg,
    Outer,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Gp => "gp",
            Phase::Cg => "cg",
            Phase::Outer => "outer",
        })
    }
}

/// One line of the solver trace: `outer,phase,q,pg_norm,nfree,cg_iters,eta2`.
///
/// `gp` records follow every accepted gradient projection iterate, `cg` records every CG
/// call and its projected search, and an `outer` record closes each outer iterate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub outer: usize,
    pub phase: Phase,
    pub q: f64,
    pub pg_norm: f64,
    pub nfree: usize,
    pub cg_iters: usize,
    pub eta2: f64,
}

pub const TRACE_HEADER: &str = "outer,phase,q,pg_norm,nfree,cg_iters,eta2";

impl TraceRecord {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:e},{:e},{},{},{:e}",
            self.outer, self.phase, self.q, self.pg_norm, self.nfree, self.cg_iters, self.eta2
        )
    }
}

/// Summary of one outer iterate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterRecord {
    pub outer: usize,
    pub gp_iters: usize,
    pub cg_iters: usize,
    pub cg_calls: usize,
    pub refinements: usize,
    pub q: f64,
    pub pg_norm: f64,
    pub nfree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverStats {
    pub n: usize,
    pub outer_iters: usize,
    pub gp_iters_total: usize,
    pub cg_iters_total: usize,
    pub cg_calls: usize,
    pub faces_visited: usize,
    pub free_fraction_final: f64,
    pub final_pg_norm: f64,
    pub objective_final: f64,
    pub wall_time_seconds: f64,
    /// Time spent building preconditioners and running CG.
    pub cg_time_seconds: f64,
    pub per_outer: Vec<OuterRecord>,
}

impl SolverStats {
    /// Share of wall time spent in CG including preconditioner setup, in percent.
    pub fn cg_time_percent(&self) -> f64 {
        if self.wall_time_seconds > 0.0 {
            100.0 * self.cg_time_seconds / self.wall_time_seconds
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "reason", rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxOuterReached,
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x_star: DenseVector,
    pub stats: SolverStats,
    pub status: SolveStatus,
    pub trace: Vec<TraceRecord>,
}

/// First `x⁺ = P[x + αd]`, `α ∈ {1, ½, ¼, …}`, with `q(x⁺) ≤ q(x) + μ⟨∇q(x), x⁺ − x⟩`.
pub fn projected_search_cg(
    qp: &BoundQP,
    x: &[f64],
    g: &[f64],
    d: &[f64],
    mu: f64,
    max_halvings: usize,
) -> Result<SearchStep> {
    check_len("projected_search_cg direction", qp.n(), d.len())?;
    projected_backtrack(qp, x, g, d, 1.0, mu, max_halvings)
}

fn face_key(active: &IndexSet) -> u64 {
    let mut h = DefaultHasher::new();
    active.hash(&mut h);
    h.finish()
}

/// Minimizes `qp` from `x0` (projected onto the box first; the projection must be finite).
///
/// Invalid input is an `Err`; numerical trouble inside the iteration is reported as
/// [`SolveStatus::Failed`] together with the last iterate.
pub fn solve(qp: &BoundQP, x0: &[f64], cfg: &SolverConfig) -> Result<SolveOutcome> {
    cfg.validate()?;
    check_len("initial point", qp.n(), x0.len())?;
    if let Some(i) = x0.iter().position(|v| v.is_nan()) {
        return Err(GpcgError::NonFinite { index: i });
    }
    let mut run = Run::new(qp, cfg, x0)?;
    let status = match run.iterate() {
        Ok(status) => status,
        Err(e) => SolveStatus::Failed(e.to_string()),
    };
    run.finish(status)
}

struct Run<'a> {
    qp: &'a BoundQP,
    cfg: &'a SolverConfig,
    x: DenseVector,
    g: DenseVector,
    q: f64,
    pg_norm: f64,
    trace: Vec<TraceRecord>,
    per_outer: Vec<OuterRecord>,
    faces: HashSet<u64>,
    gp_total: usize,
    cg_total: usize,
    cg_calls: usize,
    cg_time: f64,
    started: Instant,
}

impl<'a> Run<'a> {
    fn new(qp: &'a BoundQP, cfg: &'a SolverConfig, x0: &[f64]) -> Result<Self> {
        let started = Instant::now();
        let x = qp.project(x0)?;
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(GpcgError::NonFinite { index: i });
        }
        let (q, g) = qp.objective_and_gradient(&x)?;
        let pg_norm = qp.projected_gradient_norm(&x, &g)?;
        Ok(Self {
            qp,
            cfg,
            x,
            g,
            q,
            pg_norm,
            trace: Vec::new(),
            per_outer: Vec::new(),
            faces: HashSet::new(),
            gp_total: 0,
            cg_total: 0,
            cg_calls: 0,
            cg_time: 0.0,
            started,
        })
    }

    fn record_face(&mut self) -> Result<()> {
        let key = face_key(&self.qp.active_set(&self.x)?);
        self.faces.insert(key);
        Ok(())
    }

    fn iterate(&mut self) -> Result<SolveStatus> {
        let gp_params = self.cfg.gp_params();
        for outer in 0..self.cfg.max_outer {
            self.record_face()?;
            let mut summary = OuterRecord {
                outer,
                gp_iters: 0,
                cg_iters: 0,
                cg_calls: 0,
                refinements: 0,
                q: self.q,
                pg_norm: self.pg_norm,
                nfree: 0,
            };
            let q_start = self.q;

            let gp = gp_phase(self.qp, &self.x, &gp_params)?;
            for it in &gp.iterates {
                self.trace.push(TraceRecord {
                    outer,
                    phase: Phase::Gp,
                    q: it.objective,
                    pg_norm: it.pg_norm,
                    nfree: self.qp.n() - it.active,
                    cg_iters: 0,
                    eta2: self.cfg.eta2_init,
                });
            }
            summary.gp_iters = gp.iterates_taken;
            self.gp_total += gp.iterates_taken;
            self.x = gp.x_out;
            self.g = gp.gradient;
            self.q = gp.objective;
            self.pg_norm = gp.pg_norm;
            debug!(
                "outer {outer}: gp {} iterates ({:?}) q={:.12e} pg={:.3e}",
                gp.iterates_taken, gp.termination, self.q, self.pg_norm
            );

            let converged = self.pg_norm <= self.cfg.tau || self.face_search(outer, &mut summary, q_start)?;
            self.close_outer(outer, summary)?;
            if converged {
                return Ok(SolveStatus::Converged);
            }
        }
        Ok(SolveStatus::MaxOuterReached)
    }

    /// CG on the current face followed by the projected search, repeated with a tighter
    /// `η₂` while every active variable is binding. Returns whether the iterate converged.
    fn face_search(&mut self, outer: usize, summary: &mut OuterRecord, q_start: f64) -> Result<bool> {
        let mut eta2 = self.cfg.eta2_init;
        let mut carry: Option<(IndexSet, DenseVector)> = None;
        for refinement in 0..=MAX_REFINEMENTS {
            let free = self.qp.free_set(&self.x)?;
            if free.is_empty() {
                // Gradient projection alone must make progress from an all-active face.
                if self.q < q_start {
                    return Ok(false);
                }
                return Err(GpcgError::Degenerate);
            }

            let cg_started = Instant::now();
            let sys = build_reduced(self.qp, &self.g, &free)?;
            let precond = Preconditioner::build(self.cfg.precond, self.cfg.blocks, &sys.matrix)?;
            let w0 = match carry.take() {
                Some((prev_free, w)) if self.cfg.warm_start_cg && prev_free == free => w,
                _ => vec![0.0; free.len()],
            };
            let cg = pcg_progress(&sys, &precond, &w0, eta2, self.cfg.cg_maxiter)?;
            self.cg_time += cg_started.elapsed().as_secs_f64();
            self.cg_total += cg.iterations;
            self.cg_calls += 1;
            summary.cg_iters += cg.iterations;
            summary.cg_calls += 1;

            let d = scatter(&cg.w, &free, &vec![0.0; self.qp.n()])?;
            let step = projected_search_cg(self.qp, &self.x, &self.g, &d, self.cfg.mu, self.cfg.max_halvings)?;
            self.x = step.point;
            let (q, g) = self.qp.objective_and_gradient(&self.x)?;
            self.q = q;
            self.g = g;
            self.pg_norm = self.qp.projected_gradient_norm(&self.x, &self.g)?;
            let nfree = self.qp.free_set(&self.x)?.len();
            self.trace.push(TraceRecord {
                outer,
                phase: Phase::Cg,
                q: self.q,
                pg_norm: self.pg_norm,
                nfree,
                cg_iters: cg.iterations,
                eta2,
            });
            debug!(
                "outer {outer}: cg {} iterations ({:?}) eta2={eta2:e} alpha={} q={:.12e} pg={:.3e}",
                cg.iterations, cg.termination, step.step, self.q, self.pg_norm
            );

            if self.pg_norm <= self.cfg.tau {
                return Ok(true);
            }
            let on_optimal_face = self.qp.binding_set(&self.x, &self.g)? == self.qp.active_set(&self.x)?;
            if !on_optimal_face || eta2 <= self.cfg.eta2_floor || refinement == MAX_REFINEMENTS {
                return Ok(false);
            }
            if cg.termination == CgTermination::ExactSolve && step.step == 1.0 && cg.iterations == 0 {
                // Nothing left to improve on this face.
                return Ok(false);
            }
            summary.refinements += 1;
            eta2 = (eta2 * self.cfg.eta2_shrink).max(self.cfg.eta2_floor);
            let remaining: Vec<f64> = cg.w.iter().map(|w| (1.0 - step.step) * w).collect();
            carry = Some((free, remaining));
        }
        Ok(false)
    }

    fn close_outer(&mut self, outer: usize, mut summary: OuterRecord) -> Result<()> {
        let nfree = self.qp.free_set(&self.x)?.len();
        summary.q = self.q;
        summary.pg_norm = self.pg_norm;
        summary.nfree = nfree;
        self.trace.push(TraceRecord {
            outer,
            phase: Phase::Outer,
            q: self.q,
            pg_norm: self.pg_norm,
            nfree,
            cg_iters: summary.cg_iters,
            eta2: self.cfg.eta2_init,
        });
        self.per_outer.push(summary);
        Ok(())
    }

    fn finish(mut self, status: SolveStatus) -> Result<SolveOutcome> {
        self.record_face()?;
        let n = self.qp.n();
        let nfree = self.qp.free_set(&self.x)?.len();
        let stats = SolverStats {
            n,
            outer_iters: self.per_outer.len(),
            gp_iters_total: self.gp_total,
            cg_iters_total: self.cg_total,
            cg_calls: self.cg_calls,
            faces_visited: self.faces.len(),
            free_fraction_final: if n == 0 { 0.0 } else { nfree as f64 / n as f64 },
            final_pg_norm: self.pg_norm,
            objective_final: self.q,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            cg_time_seconds: self.cg_time,
            per_outer: self.per_outer,
        };
        Ok(SolveOutcome {
            x_star: self.x,
            stats,
            status,
            trace: self.trace,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{norm_inf, CsrMatrix};
    use crate::oracle::dense_solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: f64 = f64::INFINITY;

    fn hand_example() -> BoundQP {
        BoundQP::new(CsrMatrix::identity(2), vec![-3.0, 1.0], 0.0, vec![0.0; 2], vec![2.0; 2]).unwrap()
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = (0..n).map(|k| m[k][i] * m[k][j]).sum::<f64>();
            }
            a[i][i] += 0.5;
        }
        a
    }

    #[test]
    fn hand_example_solution() {
        let qp = hand_example();
        let out = solve(&qp, &[1.0, 1.0], &SolverConfig::default()).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        assert_eq!(out.x_star, vec![2.0, 0.0]);
        assert!(out.stats.final_pg_norm <= 1e-10);
        assert_eq!(out.stats.free_fraction_final, 0.0);
    }

    #[test]
    fn unconstrained_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = rng.random_range(1..30);
            let d = random_spd(&mut rng, n);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let qp = BoundQP::unconstrained(CsrMatrix::from_dense(&d).unwrap(), b.clone(), 0.0).unwrap();
            let cfg = SolverConfig { tau: 1e-10, ..SolverConfig::default() };
            let out = solve(&qp, &vec![0.0; n], &cfg).unwrap();
            assert_eq!(out.status, SolveStatus::Converged);
            let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
            let oracle = dense_solve(&d, &neg_b).unwrap();
            let err = out.x_star.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-6, "n={n} err={err:e}");
        }
    }

    #[test]
    fn cg_search_with_zero_direction_keeps_point() {
        let qp = hand_example();
        let x = [1.0, 1.0];
        let g = qp.gradient(&x).unwrap();
        let step = projected_search_cg(&qp, &x, &g, &[0.0, 0.0], 0.1, 50).unwrap();
        assert_eq!(step.point, x.to_vec());
        assert_eq!((step.step, step.halvings, step.decrease), (1.0, 0, 0.0));
    }

    #[test]
    fn cg_search_accepts_interior_newton_step() {
        let qp = BoundQP::new(CsrMatrix::identity(2), vec![-1.0, -1.0], 0.0, vec![0.0; 2], vec![2.0; 2]).unwrap();
        let x = [0.5, 1.5];
        let g = qp.gradient(&x).unwrap();
        let d: Vec<f64> = g.iter().map(|v| -v).collect();
        let step = projected_search_cg(&qp, &x, &g, &d, 0.1, 50).unwrap();
        assert_eq!(step.step, 1.0);
        assert_eq!(step.point, vec![1.0, 1.0]);
    }

    #[test]
    fn cg_search_clipped_step_satisfies_sufficient_decrease() {
        let a = CsrMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let qp = BoundQP::new(a, vec![-8.0, 2.0], 0.0, vec![0.0, -1.0], vec![1.5, 1.0]).unwrap();
        let x = [0.2, 0.9];
        let g = qp.gradient(&x).unwrap();
        let d = [3.0, -4.0];
        let mu = 0.1;
        let step = projected_search_cg(&qp, &x, &g, &d, mu, 50).unwrap();
        // direct re-evaluation of the acceptance test
        let lhs = qp.objective(&step.point).unwrap();
        let rhs = qp.objective(&x).unwrap() + mu * (0..2).map(|i| g[i] * (step.point[i] - x[i])).sum::<f64>();
        assert!(lhs <= rhs + 1e-14, "{lhs} > {rhs}");
        assert!(qp.is_feasible(&step.point));
        let expected_alpha = 0.5_f64.powi(step.halvings as i32);
        assert_eq!(step.step, expected_alpha);
        // the previous trial must fail the test
        if step.halvings > 0 {
            let prev_alpha = 2.0 * step.step;
            let prev = qp.project(&[x[0] + prev_alpha * d[0], x[1] + prev_alpha * d[1]]).unwrap();
            let lhs = qp.objective(&prev).unwrap();
            let rhs = qp.objective(&x).unwrap() + mu * (0..2).map(|i| g[i] * (prev[i] - x[i])).sum::<f64>();
            assert!(lhs > rhs);
        }
    }

    #[test]
    fn uphill_direction_exhausts_halvings() {
        let qp = BoundQP::unconstrained(CsrMatrix::identity(1), vec![-1.0], 0.0).unwrap();
        let g = qp.gradient(&[0.0]).unwrap();
        let err = projected_search_cg(&qp, &[0.0], &g, &[-1.0], 0.1, 50).unwrap_err();
        assert!(matches!(err, GpcgError::SearchFailed { halvings: 50 }));
    }

    #[test]
    fn infeasible_start_is_projected() {
        let out = solve(&hand_example(), &[-5.0, 9.0], &SolverConfig::default()).unwrap();
        assert_eq!(out.x_star, vec![2.0, 0.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let qp = hand_example();
        assert!(matches!(solve(&qp, &[0.0], &SolverConfig::default()), Err(GpcgError::DimensionMismatch { .. })));
        assert!(matches!(solve(&qp, &[f64::NAN, 0.0], &SolverConfig::default()), Err(GpcgError::NonFinite { index: 0 })));
        let free = BoundQP::unconstrained(CsrMatrix::identity(2), vec![0.0; 2], 0.0).unwrap();
        assert!(matches!(solve(&free, &[0.0, INF], &SolverConfig::default()), Err(GpcgError::NonFinite { index: 1 })));
        // an infinite start is fine when the bound clips it
        assert_eq!(solve(&qp, &[INF, -INF], &SolverConfig::default()).unwrap().x_star, vec![2.0, 0.0]);
        for cfg in [
            SolverConfig { mu: 0.5, ..SolverConfig::default() },
            SolverConfig { eta1: 0.0, ..SolverConfig::default() },
            SolverConfig { eta2_init: 1.0, ..SolverConfig::default() },
            SolverConfig { tau: 0.0, ..SolverConfig::default() },
            SolverConfig { blocks: 0, ..SolverConfig::default() },
        ] {
            assert!(matches!(solve(&qp, &[0.0, 0.0], &cfg), Err(GpcgError::InvalidConfig(_))));
        }
    }

    #[test]
    fn indefinite_hessian_is_a_failed_outcome() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let qp = BoundQP::new(a, vec![1.0, -1.0], 0.0, vec![-INF; 2], vec![INF; 2]).unwrap();
        let out = solve(&qp, &[0.0, 0.0], &SolverConfig::default()).unwrap();
        assert!(matches!(out.status, SolveStatus::Failed(_)), "{:?}", out.status);
    }

    #[test]
    fn max_outer_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_spd(&mut rng, 20);
        let qp = BoundQP::new(CsrMatrix::from_dense(&d).unwrap(), vec![1.0; 20], 0.0, vec![-0.1; 20], vec![0.1; 20]).unwrap();
        let cfg = SolverConfig { max_outer: 1, tau: 1e-300, precond: PreconditionerKind::None, ..SolverConfig::default() };
        let out = solve(&qp, &[0.1; 20], &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::MaxOuterReached);
        assert_eq!(out.stats.outer_iters, 1);
    }

    #[test]
    fn stats_agree_with_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..30 {
            let n = rng.random_range(2..25);
            let d = random_spd(&mut rng, n);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let lo: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { -0.3 } else { -INF }).collect();
            let hi: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 0.3 } else { INF }).collect();
            let qp = BoundQP::new(CsrMatrix::from_dense(&d).unwrap(), b, 0.0, lo, hi).unwrap();
            let cfg = SolverConfig {
                tau: 1e-9,
                precond: if case % 2 == 0 { PreconditionerKind::Jacobi } else { PreconditionerKind::BlockJacobiIlu { fill: 2 } },
                ..SolverConfig::default()
            };
            let out = solve(&qp, &vec![0.0; n], &cfg).unwrap();
            assert_eq!(out.status, SolveStatus::Converged);
            let s = &out.stats;
            assert_eq!(out.trace.len(), s.outer_iters + s.gp_iters_total + s.cg_calls);
            assert_eq!(out.trace.iter().filter(|t| t.phase == Phase::Outer).count(), s.outer_iters);
            assert_eq!(out.trace.iter().filter(|t| t.phase == Phase::Cg).map(|t| t.cg_iters).sum::<usize>(), s.cg_iters_total);
            assert!(s.faces_visited >= 1 && s.faces_visited <= s.outer_iters + s.gp_iters_total);
            let nfree = qp.free_set(&out.x_star).unwrap().len();
            assert_eq!(s.free_fraction_final, nfree as f64 / n as f64);
            assert!(s.final_pg_norm <= cfg.tau);

            // eta2 within an outer iterate never increases and stays above the floor
            for outer in 0..s.outer_iters {
                let etas: Vec<f64> =
                    out.trace.iter().filter(|t| t.outer == outer && t.phase == Phase::Cg).map(|t| t.eta2).collect();
                assert!(etas.windows(2).all(|w| w[1] <= w[0]));
                assert!(etas.iter().all(|&e| e >= cfg.eta2_floor && e <= cfg.eta2_init));
            }
            // objective decreases across outer iterates
            let qs: Vec<f64> = s.per_outer.iter().map(|r| r.q).collect();
            assert!(qs.windows(2).all(|w| w[1] < w[0]), "{qs:?}");
            let g = qp.gradient(&out.x_star).unwrap();
            assert!(norm_inf(&qp.projected_gradient(&out.x_star, &g).unwrap()) <= cfg.tau);
        }
    }

    #[test]
    fn trace_csv_layout() {
        let rec = TraceRecord { outer: 3, phase: Phase::Cg, q: -1.5, pg_norm: 0.25, nfree: 7, cg_iters: 4, eta2: 0.05 };
        assert_eq!(rec.to_csv(), "3,cg,-1.5e0,2.5e-1,7,4,5e-2");
        assert_eq!(TRACE_HEADER.split(',').count(), rec.to_csv().split(',').count());
    }
}
