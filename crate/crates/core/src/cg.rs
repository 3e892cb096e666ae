//! Preconditioned conjugate gradient on the reduced subproblem
//! `min q_k(w) = ½⟨w, A_k w⟩ + ⟨r_k, w⟩` over the free variables.
//!
//! Iteration stops at the first `j ≥ 2` whose decrease `q_k(w_{j−1}) − q_k(w_j)` is at most
//! `η₂` times the largest earlier decrease. A residual check at machine precision catches the
//! case where CG has already solved the system exactly.

use serde::Serialize;

use crate::error::{check_len, GpcgError, Result};
use crate::linalg::{axpy_unchecked, dot_unchecked, gather, norm2, CsrMatrix, DenseVector, IndexSet};
use crate::precond::Preconditioner;
use crate::qp::BoundQP;

/// Residual threshold for `ExactSolve`, relative to `1 + ‖r_k‖`.
pub const EXACT_SOLVE_RTOL: f64 = 1e-14;

/// Reduced Hessian and gradient restricted to the free variables of an iterate.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: DenseVector,
    pub free: IndexSet,
}

impl ReducedSystem {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// `q_k(w)`
    pub fn objective(&self, w: &[f64]) -> Result<f64> {
        let aw = self.matrix.mat_vec(w)?;
        Ok(0.5 * dot_unchecked(w, &aw) + dot_unchecked(&self.rhs, w))
    }
}

/// `A_k = A[free, free]`, `r_k = g[free]`.
pub fn build_reduced(qp: &BoundQP, g: &[f64], free: &IndexSet) -> Result<ReducedSystem> {
    check_len("build_reduced gradient", qp.n(), g.len())?;
    if free.is_empty() {
        return Err(GpcgError::NoFreeVariables);
    }
    Ok(ReducedSystem {
        matrix: qp.hessian().extract_submatrix(free, free)?,
        rhs: gather(g, free)?,
        free: free.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CgTermination {
    ProgressTest,
    MaxIter,
    ExactSolve,
}

#[derive(Debug, Clone)]
pub struct CgResult {
    pub w: DenseVector,
    pub iterations: usize,
    /// `q_k(w_{j−1}) − q_k(w_j)` for `j = 1..=iterations`
    pub decreases: Vec<f64>,
    pub termination: CgTermination,
}

/// Runs PCG from `w0` until the progress test fires, the residual vanishes, or
/// `min(maxiter, m_k)` iterations have been taken.
///
/// A non-positive curvature `⟨p, A_k p⟩` aborts with [`GpcgError::Breakdown`].
pub fn pcg_progress(
    sys: &ReducedSystem,
    precond: &Preconditioner,
    w0: &[f64],
    eta2: f64,
    maxiter: Option<usize>,
) -> Result<CgResult> {
    let m = sys.dim();
    check_len("pcg start point", m, w0.len())?;
    check_len("pcg preconditioner", m, precond.dim())?;
    if !(eta2 > 0.0) {
        return Err(GpcgError::InvalidConfig(format!("eta2 must be positive, got {eta2}")));
    }
    let limit = maxiter.unwrap_or(m).min(m);
    let exact_tol = EXACT_SOLVE_RTOL * (1.0 + norm2(&sys.rhs));

    let mut w = w0.to_vec();
    // residual = −∇q_k(w) = −(A_k w + r_k)
    let mut res = sys.matrix.mat_vec(&w)?;
    for (ri, bi) in res.iter_mut().zip(&sys.rhs) {
        *ri = -(*ri + bi);
    }
    let mut decreases = Vec::new();
    if norm2(&res) <= exact_tol {
        return Ok(CgResult { w, iterations: 0, decreases, termination: CgTermination::ExactSolve });
    }

    let mut z = precond.apply(&res)?;
    let mut p = z.clone();
    let mut rz = dot_unchecked(&res, &z);
    let mut ap = vec![0.0; m];
    let mut best = 0.0_f64;

    for j in 1..=limit {
        sys.matrix.mat_vec_into(&p, &mut ap)?;
        let curvature = dot_unchecked(&p, &ap);
        if !(curvature > 0.0) {
            return Err(GpcgError::Breakdown { curvature });
        }
        let alpha = rz / curvature;
        // q_k(w + αp) − q_k(w) = −α⟨res, p⟩ + ½α²⟨p, A_k p⟩
        let decrease = alpha * dot_unchecked(&res, &p) - 0.5 * alpha * alpha * curvature;
        axpy_unchecked(alpha, &p, &mut w);
        axpy_unchecked(-alpha, &ap, &mut res);
        decreases.push(decrease);

        if norm2(&res) <= exact_tol {
            return Ok(CgResult { w, iterations: j, decreases, termination: CgTermination::ExactSolve });
        }
        if j >= 2 && decrease <= eta2 * best {
            return Ok(CgResult { w, iterations: j, decreases, termination: CgTermination::ProgressTest });
        }
        if j == limit {
            break;
        }
        best = best.max(decrease);

        precond.apply_into(&res, &mut z)?;
        let rz_next = dot_unchecked(&res, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Ok(CgResult { w, iterations: limit, decreases, termination: CgTermination::MaxIter })
}
