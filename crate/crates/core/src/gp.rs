//! Gradient projection phase.
//!
//! Starting from `y₀`, iterates `y_{j+1} = P[y_j − α_j ∇q(y_j)]` where `α_j` is the first of
//! `α₀, α₀/2, α₀/4, …` giving sufficient decrease and `α₀` minimizes `q` exactly along the
//! projected gradient. The phase ends once the active set stops changing or the decrease of
//! the latest step falls below `η₁` times the best decrease seen so far.

use log::trace;
use serde::Serialize;

use crate::error::{GpcgError, Result};
use crate::linalg::{dot_unchecked, norm2, DenseVector, IndexSet};
use crate::qp::BoundQP;

/// `α₀ = ⟨∇q(y), d⟩ / ⟨d, Ad⟩`, the exact minimizer of `α ↦ q(y − αd)`.
pub fn cauchy_step_size(qp: &BoundQP, g: &[f64], d: &[f64]) -> Result<f64> {
    if d.iter().all(|&v| v == 0.0) {
        return Err(GpcgError::AlreadyStationary);
    }
    let ad = qp.hessian().mat_vec(d)?;
    let curvature = dot_unchecked(d, &ad);
    if curvature <= 0.0 {
        return Err(GpcgError::NotConvex { curvature });
    }
    Ok(crate::linalg::dot(g, d)? / curvature)
}

/// An accepted projected-search step.
#[derive(Debug, Clone)]
pub struct SearchStep {
    pub point: DenseVector,
    pub step: f64,
    pub halvings: usize,
    /// `q(x) − q(x⁺)`
    pub decrease: f64,
}

/// Shared backtracking loop for both projected searches: try `x⁺ = P[x + α·dir]` for
/// `α = α₀·2^{-j}` until `q(x⁺) ≤ q(x) + μ⟨g, x⁺ − x⟩`.
pub(crate) fn projected_backtrack(
    qp: &BoundQP,
    x: &[f64],
    g: &[f64],
    dir: &[f64],
    alpha0: f64,
    mu: f64,
    max_halvings: usize,
) -> Result<SearchStep> {
    let mut alpha = alpha0;
    let mut trial = vec![0.0; x.len()];
    let mut s = vec![0.0; x.len()];
    for halvings in 0..=max_halvings {
        for i in 0..x.len() {
            trial[i] = x[i] + alpha * dir[i];
        }
        let trial_p = qp.project(&trial)?;
        for i in 0..x.len() {
            s[i] = trial_p[i] - x[i];
        }
        let change = qp.objective_change(g, &s)?;
        let model = mu * dot_unchecked(g, &s);
        if change <= model {
            return Ok(SearchStep {
                point: trial_p,
                step: alpha,
                halvings,
                decrease: -change,
            });
        }
        alpha *= 0.5;
    }
    Err(GpcgError::SearchFailed { halvings: max_halvings })
}

/// First `y⁺ = P[y − αg]`, `α ∈ {α₀, α₀/2, …}`, satisfying the sufficient decrease condition.
pub fn projected_search_gp(
    qp: &BoundQP,
    y: &[f64],
    g: &[f64],
    alpha0: f64,
    mu: f64,
    max_halvings: usize,
) -> Result<SearchStep> {
    let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
    projected_backtrack(qp, y, g, &neg_g, alpha0, mu, max_halvings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GpTermination {
    ActiveSetSettled,
    InsufficientProgress,
    Converged,
    IterationCap,
}

#[derive(Debug, Clone, Copy)]
pub struct GpParams {
    pub eta1: f64,
    pub mu: f64,
    pub tau: f64,
    pub cap: usize,
    pub max_halvings: usize,
}

impl Default for GpParams {
    fn default() -> Self {
        Self {
            eta1: 0.1,
            mu: 0.1,
            tau: 1e-4,
            cap: 100,
            max_halvings: 50,
        }
    }
}

/// Bookkeeping for one accepted gradient projection iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct GpIterate {
    pub index: usize,
    pub objective: f64,
    pub step: f64,
    pub halvings: usize,
    pub active: usize,
    pub pg_norm: f64,
}

#[derive(Debug, Clone)]
pub struct GpResult {
    pub x_out: DenseVector,
    /// `∇q(x_out)`
    pub gradient: DenseVector,
    pub objective: f64,
    pub pg_norm: f64,
    pub iterates_taken: usize,
    pub termination: GpTermination,
    /// `q(y_{j−1}) − q(y_j)` for `j = 1..=iterates_taken`
    pub decreases: Vec<f64>,
    pub iterates: Vec<GpIterate>,
}

pub fn gp_phase(qp: &BoundQP, x: &[f64], params: &GpParams) -> Result<GpResult> {
    if !(params.eta1 > 0.0 && params.eta1 < 1.0) || !(params.mu > 0.0 && params.mu < 0.5) || params.cap == 0 {
        return Err(GpcgError::InvalidConfig(format!("bad gradient projection parameters {params:?}")));
    }
    qp.check_feasible(x)?;
    let mut y = x.to_vec();
    let (mut q, mut g) = qp.objective_and_gradient(&y)?;
    let mut pg = qp.projected_gradient(&y, &g)?;
    let mut pg_norm = norm2(&pg);
    let mut decreases = Vec::new();
    let mut iterates = Vec::new();

    let finish = |y, g, q, pg_norm, decreases: Vec<f64>, iterates, termination| GpResult {
        x_out: y,
        gradient: g,
        objective: q,
        pg_norm,
        iterates_taken: decreases.len(),
        termination,
        decreases,
        iterates,
    };

    if pg_norm <= params.tau {
        return Ok(finish(y, g, q, pg_norm, decreases, iterates, GpTermination::Converged));
    }
    let mut active_prev: IndexSet = qp.active_set(&y)?;

    for j in 1..=params.cap {
        let alpha0 = match cauchy_step_size(qp, &g, &pg) {
            Ok(a) => a,
            Err(GpcgError::AlreadyStationary) => {
                return Ok(finish(y, g, q, pg_norm, decreases, iterates, GpTermination::Converged));
            }
            Err(e) => return Err(e),
        };
        let step = projected_search_gp(qp, &y, &g, alpha0, params.mu, params.max_halvings)?;
        y = step.point;
        let (qn, gn) = qp.objective_and_gradient(&y)?;
        q = qn;
        g = gn;
        pg = qp.projected_gradient(&y, &g)?;
        pg_norm = norm2(&pg);
        let best = decreases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        decreases.push(step.decrease);
        let active = qp.active_set(&y)?;
        trace!(
            "gp j={j} q={q:.12e} alpha={:.3e} halvings={} |A|={} pg={pg_norm:.3e}",
            step.step,
            step.halvings,
            active.len()
        );
        iterates.push(GpIterate {
            index: j,
            objective: q,
            step: step.step,
            halvings: step.halvings,
            active: active.len(),
            pg_norm,
        });

        let termination = if pg_norm <= params.tau {
            Some(GpTermination::Converged)
        } else if active == active_prev {
            Some(GpTermination::ActiveSetSettled)
        } else if j >= 2 && step.decrease <= params.eta1 * best {
            Some(GpTermination::InsufficientProgress)
        } else if j == params.cap {
            Some(GpTermination::IterationCap)
        } else {
            None
        };
        if let Some(t) = termination {
            return Ok(finish(y, g, q, pg_norm, decreases, iterates, t));
        }
        active_prev = active;
    }
    unreachable!("loop returns at j == cap")
}
