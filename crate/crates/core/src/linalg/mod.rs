//! Dense vector kernels, CSR storage and the index-set machinery that stands in for the
//! selection matrix of the free variables.
//!
//! Every reduction sums left to right so results are reproducible bit for bit.

mod csr;
mod index_set;

pub use csr::CsrMatrix;
pub use index_set::IndexSet;

use crate::error::{check_len, GpcgError, Result};

/// Dense vectors are plain `Vec<f64>`; bound vectors may hold `±inf`.
pub type DenseVector = Vec<f64>;

pub fn dot(x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("dot", x.len(), y.len())?;
    Ok(dot_unchecked(x, y))
}

/// `y <- y + alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) -> Result<()> {
    check_len("axpy", y.len(), x.len())?;
    axpy_unchecked(alpha, x, y);
    Ok(())
}

pub fn norm2(x: &[f64]) -> f64 {
    dot_unchecked(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub(crate) fn dot_unchecked(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        acc += a * b;
    }
    acc
}

pub(crate) fn axpy_unchecked(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `out[p] = v[s[p]]`
pub fn gather(v: &[f64], s: &IndexSet) -> Result<DenseVector> {
    check_index_range(s, v.len())?;
    Ok(s.iter().map(|i| v[i]).collect())
}

/// Copy of `base` with `out[s[p]] = w[p]`.
pub fn scatter(w: &[f64], s: &IndexSet, base: &[f64]) -> Result<DenseVector> {
    check_len("scatter", s.len(), w.len())?;
    check_index_range(s, base.len())?;
    let mut out = base.to_vec();
    for (p, i) in s.iter().enumerate() {
        out[i] = w[p];
    }
    Ok(out)
}

fn check_index_range(s: &IndexSet, dim: usize) -> Result<()> {
    match s.as_slice().last() {
        Some(&last) if last >= dim => Err(GpcgError::IndexOutOfRange { index: last, dim }),
        _ => Ok(()),
    }
}

/// Componentwise median of `{l_i, u_i, x_i}`, i.e. the projection onto the box `[l, u]`.
pub fn pointwise_median(l: &[f64], u: &[f64], x: &[f64]) -> Result<DenseVector> {
    check_len("pointwise_median (upper)", l.len(), u.len())?;
    check_len("pointwise_median (point)", l.len(), x.len())?;
    let mut out = Vec::with_capacity(x.len());
    for (i, ((&lo, &hi), &xi)) in l.iter().zip(u).zip(x).enumerate() {
        if lo > hi {
            return Err(GpcgError::InvalidBounds {
                index: i,
                lower: lo,
                upper: hi,
            });
        }
        out.push(xi.max(lo).min(hi));
    }
    Ok(out)
}
