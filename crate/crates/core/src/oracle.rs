//! Reference solvers for verification: a dense Cholesky solve and an exhaustive active-set
//! enumeration for very small bound-constrained problems.
//!
//! These share nothing with the iterative solver path beyond [`BoundQP`] itself.

use crate::error::{check_len, GpcgError, Result};
use crate::qp::BoundQP;

/// Row-major dense matrix.
pub type DenseMatrix = Vec<Vec<f64>>;

/// Largest problem [`solve_enum`] accepts (3¹² subproblems).
pub const ENUM_LIMIT: usize = 12;

/// Solves `A x = rhs` for symmetric positive definite `A` by Cholesky factorization.
pub fn dense_solve(a: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.len();
    check_len("dense_solve rhs", n, rhs.len())?;
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        check_len("dense_solve row", n, a[j].len())?;
        let d = a[j][j] - l[j][..j].iter().map(|v| v * v).sum::<f64>();
        if !(d > 0.0) {
            return Err(GpcgError::NotPositiveDefinite { column: j, pivot: d });
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..n {
            let s = a[i][j] - l[i][..j].iter().zip(&l[j][..j]).map(|(u, v)| u * v).sum::<f64>();
            l[i][j] = s / d;
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    Ok(x)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Lower,
    Upper,
    Free,
}

/// Finds the unique KKT point by trying every assignment of each variable to
/// {at lower bound, at upper bound, free}.
pub fn solve_enum(qp: &BoundQP) -> Result<Vec<f64>> {
    let n = qp.n();
    if n > ENUM_LIMIT {
        return Err(GpcgError::TooLarge { n, limit: ENUM_LIMIT });
    }
    let a = qp.hessian().to_dense();
    let (b, lo, hi) = (qp.linear(), qp.lower(), qp.upper());
    let scale = 1.0
        + a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
        + b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;

    let choices: Vec<Vec<Slot>> = (0..n)
        .map(|i| {
            let mut c = vec![Slot::Free];
            if lo[i].is_finite() {
                c.push(Slot::Lower);
            }
            if hi[i].is_finite() && hi[i] != lo[i] {
                c.push(Slot::Upper);
            }
            c
        })
        .collect();

    let mut found: Option<Vec<f64>> = None;
    let mut digits = vec![0usize; n];
    loop {
        let slots: Vec<Slot> = (0..n).map(|i| choices[i][digits[i]]).collect();
        if let Some(x) = kkt_candidate(&a, b, lo, hi, &slots, tol) {
            match &found {
                None => found = Some(x),
                Some(prev) => {
                    let gap = prev.iter().zip(&x).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
                    assert!(gap <= 1e-8, "enumeration found two distinct KKT points (gap {gap:e})");
                }
            }
        }
        // odometer increment
        let mut i = 0;
        while i < n {
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    found.ok_or(GpcgError::NoKktPoint)
}

fn kkt_candidate(a: &[Vec<f64>], b: &[f64], lo: &[f64], hi: &[f64], slots: &[Slot], tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        match slots[i] {
            Slot::Lower => x[i] = lo[i],
            Slot::Upper => x[i] = hi[i],
            Slot::Free => {}
        }
    }
    // Fixed variables with l == u always take the lower slot; a Free slot for them is
    // still tried and simply has to land on the bound.
    let free: Vec<usize> = (0..n).filter(|&i| slots[i] == Slot::Free).collect();
    if !free.is_empty() {
        let sub: Vec<Vec<f64>> = free.iter().map(|&i| free.iter().map(|&j| a[i][j]).collect()).collect();
        let rhs: Vec<f64> = free
            .iter()
            .map(|&i| {
                let fixed: f64 = (0..n).filter(|j| slots[*j] != Slot::Free).map(|j| a[i][j] * x[j]).sum();
                -(b[i] + fixed)
            })
            .collect();
        let xf = dense_solve(&sub, &rhs).ok()?;
        for (p, &i) in free.iter().enumerate() {
            x[i] = xf[p];
        }
    }
    for i in 0..n {
        if x[i] < lo[i] - tol || x[i] > hi[i] + tol {
            return None;
        }
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
    let g: Vec<f64> = (0..n).map(|i| b[i] + (0..n).map(|j| a[i][j] * x[j]).sum::<f64>()).collect();
    for i in 0..n {
        let ok = match slots[i] {
            Slot::Lower => g[i] >= -tol || lo[i] == hi[i],
            Slot::Upper => g[i] <= tol,
            Slot::Free => g[i].abs() <= tol,
        };
        if !ok {
            return None;
        }
    }
    Some(x)
}
