//! Journal bearing benchmark.
//!
//! Pressure in a lubricant film between two cylinders on `D = (0, 2π) × (0, 2b)`:
//! minimize `∫ ½ w_q ‖∇v‖² − w_l v` subject to `v ≥ 0` and `v = 0` on the boundary, with
//! `w_q = (1 + ε cos ξ₁)³` and `w_l = ε sin ξ₁`.
//!
//! The discretization is a five-point finite difference scheme on the `nx × ny` interior
//! grid points with `w_q` sampled at the midpoints between neighbouring columns. Unknowns are
//! ordered row by row (`ξ₂` outer, `ξ₁` inner).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GpcgError, Result};
use crate::linalg::CsrMatrix;
use crate::qp::BoundQP;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BearingSpec {
    pub nx: usize,
    pub ny: usize,
    /// Eccentricity, in `(0, 1)`; zero is accepted as the degenerate unloaded case.
    pub eps: f64,
    /// Half-height of the domain in `ξ₂`.
    pub b_dom: f64,
}

impl BearingSpec {
    pub const DEFAULT_B: f64 = 10.0;

    pub fn new(nx: usize, ny: usize, eps: f64) -> Self {
        Self { nx, ny, eps, b_dom: Self::DEFAULT_B }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(GpcgError::InvalidConfig("grid must have at least one point per direction".into()));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(GpcgError::InvalidConfig(format!("eccentricity {} outside [0, 1)", self.eps)));
        }
        if !(self.b_dom > 0.0 && self.b_dom.is_finite()) {
            return Err(GpcgError::InvalidConfig(format!("domain constant b = {} must be positive", self.b_dom)));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.nx * self.ny
    }

    pub fn hx(&self) -> f64 {
        2.0 * PI / (self.nx + 1) as f64
    }

    pub fn hy(&self) -> f64 {
        2.0 * self.b_dom / (self.ny + 1) as f64
    }
}

/// `(1 + ε cos ξ₁)³`
pub fn wq(xi1: f64, eps: f64) -> f64 {
    (1.0 + eps * xi1.cos()).powi(3)
}

/// `ε sin ξ₁`
pub fn wl(xi1: f64, eps: f64) -> f64 {
    eps * xi1.sin()
}

/// Builds the discrete problem with `l ≡ 0`, `u ≡ +∞` and `c = 0`.
pub fn generate(spec: &BearingSpec) -> Result<BoundQP> {
    spec.validate()?;
    let (nx, ny) = (spec.nx, spec.ny);
    let (hx, hy) = (spec.hx(), spec.hy());
    let (cx, cy) = (hy / hx, hx / hy);
    // lambda[i] is w_q at the midpoint between columns i and i+1 (column 0 is the boundary)
    let lambda: Vec<f64> = (1..=nx + 1).map(|i| wq((i as f64 - 0.5) * hx, spec.eps)).collect();

    let n = spec.n();
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(5 * n);
    let mut values = Vec::with_capacity(5 * n);
    let mut b = Vec::with_capacity(n);
    row_offsets.push(0);
    for j in 0..ny {
        for i in 0..nx {
            let (left, right) = (lambda[i], lambda[i + 1]);
            let vertical = cy * 0.5 * (left + right);
            let idx = j * nx + i;
            if j > 0 {
                col_indices.push(idx - nx);
                values.push(-vertical);
            }
            if i > 0 {
                col_indices.push(idx - 1);
                values.push(-cx * left);
            }
            col_indices.push(idx);
            values.push(cx * (left + right) + cy * (left + right));
            if i + 1 < nx {
                col_indices.push(idx + 1);
                values.push(-cx * right);
            }
            if j + 1 < ny {
                col_indices.push(idx + nx);
                values.push(-vertical);
            }
            row_offsets.push(col_indices.len());
            b.push(-hx * hy * wl((i + 1) as f64 * hx, spec.eps));
        }
    }
    let a = CsrMatrix::new(n, n, row_offsets, col_indices, values)?;
    BoundQP::new(a, b, 0.0, vec![0.0; n], vec![f64::INFINITY; n])
}
