//! GPCG: gradient projection and conjugate gradients for bound-constrained convex QPs.
//!
//! Minimizes `q(x) = ½ xᵀAx + bᵀx + c` over the box `l ≤ x ≤ u` with `A` sparse symmetric
//! positive definite. Each outer iterate runs projected gradient steps to settle on a face,
//! then preconditioned CG on the subproblem in the free variables.
//!
//! ```
//! use gpcg::{solve, BoundQP, CsrMatrix, SolveStatus, SolverConfig};
//!
//! let qp = BoundQP::new(CsrMatrix::identity(2), vec![-3.0, 1.0], 0.0, vec![0.0; 2], vec![2.0; 2])?;
//! let out = solve(&qp, &[0.0, 0.0], &SolverConfig::default())?;
//! assert_eq!(out.status, SolveStatus::Converged);
//! assert_eq!(out.x_star, vec![2.0, 0.0]);
//! # Ok::<(), gpcg::GpcgError>(())
//! ```

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bearing;
pub mod cg;
pub mod error;
pub mod gp;
pub mod ilu;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod precond;
pub mod qp;
pub mod solver;

pub use bearing::BearingSpec;
pub use error::{GpcgError, Result};
pub use linalg::{CsrMatrix, DenseVector, IndexSet};
pub use precond::{Preconditioner, PreconditionerKind, PreconditionerSpec};
pub use qp::BoundQP;
pub use solver::{solve, SolveOutcome, SolveStatus, SolverConfig, SolverStats, TraceRecord};
