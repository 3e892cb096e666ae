//! The bound-constrained quadratic program and its optimality tests.
//!
//! `q(x) = ½ xᵀAx + bᵀx + c` over the box `l ≤ x ≤ u`, with `A` symmetric positive definite.
//! Bounds may be infinite. Activity is decided by exact equality with a bound, which is safe
//! because projection writes bound values verbatim.

use crate::error::{check_len, GpcgError, Result};
use crate::linalg::{dot_unchecked, norm2, pointwise_median, CsrMatrix, DenseVector, IndexSet};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundQP {
    a: CsrMatrix,
    b: DenseVector,
    c: f64,
    lower: DenseVector,
    upper: DenseVector,
}

impl BoundQP {
    pub fn new(a: CsrMatrix, b: DenseVector, c: f64, lower: DenseVector, upper: DenseVector) -> Result<Self> {
        a.check_symmetric()?;
        let n = a.nrows();
        check_len("linear term", n, b.len())?;
        check_len("lower bounds", n, lower.len())?;
        check_len("upper bounds", n, upper.len())?;
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(GpcgError::NonFinite { index: i });
        }
        if !c.is_finite() {
            return Err(GpcgError::InvalidConfig("constant term must be finite".into()));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(GpcgError::InvalidBounds { index: i, lower: lo, upper: hi });
            }
        }
        Ok(Self { a, b, c, lower, upper })
    }

    /// Problem with no bounds at all.
    pub fn unconstrained(a: CsrMatrix, b: DenseVector, c: f64) -> Result<Self> {
        let n = a.nrows();
        Self::new(a, b, c, vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn hessian(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn linear(&self) -> &[f64] {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.mat_vec(x)?;
        Ok(0.5 * dot_unchecked(x, &ax) + dot_unchecked(&self.b, x) + self.c)
    }

    /// `(q(x), ∇q(x))` from a single product with `A`.
    pub fn objective_and_gradient(&self, x: &[f64]) -> Result<(f64, DenseVector)> {
        let ax = self.a.mat_vec(x)?;
        let q = 0.5 * dot_unchecked(x, &ax) + dot_unchecked(&self.b, x) + self.c;
        let g = ax.iter().zip(&self.b).map(|(a, b)| a + b).collect();
        Ok((q, g))
    }

    /// `∇q(x) = Ax + b`
    pub fn gradient(&self, x: &[f64]) -> Result<DenseVector> {
        let mut g = self.a.mat_vec(x)?;
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi += bi;
        }
        Ok(g)
    }

    /// `q(x + s) − q(x) = ⟨g, s⟩ + ½⟨s, As⟩` where `g = ∇q(x)`.
    ///
    /// Algebraically identical to differencing two objective values but keeps its relative
    /// accuracy when the step is small next to `|q(x)|`.
    pub fn objective_change(&self, g: &[f64], s: &[f64]) -> Result<f64> {
        check_len("objective_change gradient", self.n(), g.len())?;
        let as_ = self.a.mat_vec(s)?;
        Ok(dot_unchecked(g, s) + 0.5 * dot_unchecked(s, &as_))
    }

    pub fn project(&self, x: &[f64]) -> Result<DenseVector> {
        pointwise_median(&self.lower, &self.upper, x)
    }

    pub fn check_feasible(&self, x: &[f64]) -> Result<()> {
        check_len("feasibility", self.n(), x.len())?;
        for (i, &xi) in x.iter().enumerate() {
            if !xi.is_finite() {
                return Err(GpcgError::NonFinite { index: i });
            }
            if xi < self.lower[i] || xi > self.upper[i] {
                return Err(GpcgError::Infeasible { index: i });
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.check_feasible(x).is_ok()
    }

    /// Gradient with its components clipped at active bounds; zero exactly at a KKT point.
    pub fn projected_gradient(&self, x: &[f64], g: &[f64]) -> Result<DenseVector> {
        self.check_feasible(x)?;
        check_len("projected_gradient", self.n(), g.len())?;
        Ok(x
            .iter()
            .zip(g)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((&xi, &gi), (&lo, &hi))| {
                if lo == hi {
                    0.0
                } else if xi == lo {
                    gi.min(0.0)
                } else if xi == hi {
                    gi.max(0.0)
                } else {
                    gi
                }
            })
            .collect())
    }

    pub fn projected_gradient_norm(&self, x: &[f64], g: &[f64]) -> Result<f64> {
        Ok(norm2(&self.projected_gradient(x, g)?))
    }

    fn active_mask(&self, x: &[f64]) -> Vec<bool> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&xi, (&lo, &hi))| xi == lo || xi == hi)
            .collect()
    }

    /// Indices sitting exactly on a bound.
    pub fn active_set(&self, x: &[f64]) -> Result<IndexSet> {
        self.check_feasible(x)?;
        Ok(IndexSet::from_mask(&self.active_mask(x)))
    }

    pub fn free_set(&self, x: &[f64]) -> Result<IndexSet> {
        self.check_feasible(x)?;
        let free: Vec<bool> = self.active_mask(x).into_iter().map(|a| !a).collect();
        Ok(IndexSet::from_mask(&free))
    }

    /// Active indices whose gradient sign holds them on their bound.
    pub fn binding_set(&self, x: &[f64], g: &[f64]) -> Result<IndexSet> {
        self.check_feasible(x)?;
        check_len("binding_set", self.n(), g.len())?;
        let mask: Vec<bool> = x
            .iter()
            .zip(g)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((&xi, &gi), (&lo, &hi))| (xi == lo && gi >= 0.0) || (xi == hi && gi <= 0.0))
            .collect();
        Ok(IndexSet::from_mask(&mask))
    }

    /// `‖∇_Ω q(x)‖₂ ≤ tol`
    pub fn converged(&self, x: &[f64], g: &[f64], tol: f64) -> Result<bool> {
        Ok(self.projected_gradient_norm(x, g)? <= tol)
    }
}
