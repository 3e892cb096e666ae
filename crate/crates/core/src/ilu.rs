//! Level-of-fill incomplete LU factorization, ILU(k).
//!
//! The symbolic phase assigns level 0 to every stored entry of the input. Eliminating pivot
//! `p` from row `i` proposes fill at `(i, j)` with level `lev(i,p) + lev(p,j) + 1`; an entry
//! is kept when its smallest proposed level is at most `k`. The numeric phase is IKJ Gaussian
//! elimination restricted to that pattern, without pivoting.
//!
//! L (unit diagonal, not stored) and U share one CSR array.

use std::collections::BTreeMap;

use crate::error::{check_len, GpcgError, Result};
use crate::linalg::CsrMatrix;

#[derive(Debug, Clone)]
pub struct IluFactorization {
    lu: CsrMatrix,
    diag: Vec<usize>,
    fill_level: usize,
}

pub fn ilu_k(m: &CsrMatrix, fill_level: usize) -> Result<IluFactorization> {
    let n = m.nrows();
    check_len("ilu_k (square)", n, m.ncols())?;

    // Symbolic phase: per row, sorted (column, level) pairs.
    let mut pattern: Vec<Vec<(usize, usize)>> = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let (cols, _) = m.row(i);
        let mut row: BTreeMap<usize, usize> = cols.iter().map(|&c| (c, 0)).collect();
        if !row.contains_key(&i) {
            return Err(GpcgError::ZeroPivot { row: i });
        }
        let mut cursor = 0;
        while let Some((&p, &lev_ip)) = row.range(cursor..i).next() {
            let prow = &pattern[p];
            let start = prow.partition_point(|&(c, _)| c <= p);
            for &(j, lev_pj) in &prow[start..] {
                let lev = lev_ip.saturating_add(lev_pj).saturating_add(1);
                if lev <= fill_level {
                    row.entry(j).and_modify(|l| *l = (*l).min(lev)).or_insert(lev);
                }
            }
            cursor = p + 1;
        }
        let row: Vec<(usize, usize)> = row.into_iter().collect();
        diag.push(row.partition_point(|&(c, _)| c < i));
        pattern.push(row);
    }

    let mut row_offsets = Vec::with_capacity(n + 1);
    row_offsets.push(0);
    let mut col_indices = Vec::new();
    for row in &pattern {
        col_indices.extend(row.iter().map(|&(c, _)| c));
        row_offsets.push(col_indices.len());
    }
    for (i, d) in diag.iter_mut().enumerate() {
        *d += row_offsets[i];
    }
    drop(pattern);

    // Numeric phase.
    let mut values = vec![0.0; col_indices.len()];
    for i in 0..n {
        let (cols, vals) = m.row(i);
        let (s, e) = (row_offsets[i], row_offsets[i + 1]);
        let mut q = s;
        for (&c, &v) in cols.iter().zip(vals) {
            while col_indices[q] != c {
                q += 1;
            }
            values[q] = v;
        }
        debug_assert!(q < e);
    }

    let mut pos = vec![usize::MAX; n];
    for i in 0..n {
        let (s, e) = (row_offsets[i], row_offsets[i + 1]);
        for q in s..e {
            pos[col_indices[q]] = q;
        }
        for q in s..diag[i] {
            let p = col_indices[q];
            let pivot = values[diag[p]];
            let factor = values[q] / pivot;
            values[q] = factor;
            for r in diag[p] + 1..row_offsets[p + 1] {
                let target = pos[col_indices[r]];
                if target != usize::MAX {
                    values[target] -= factor * values[r];
                }
            }
        }
        let d = values[diag[i]];
        if d == 0.0 || !d.is_finite() {
            return Err(GpcgError::ZeroPivot { row: i });
        }
        for q in s..e {
            pos[col_indices[q]] = usize::MAX;
        }
    }

    Ok(IluFactorization {
        lu: CsrMatrix::new(n, n, row_offsets, col_indices, values)?,
        diag,
        fill_level,
    })
}

impl IluFactorization {
    pub fn dim(&self) -> usize {
        self.lu.nrows()
    }

    pub fn fill_level(&self) -> usize {
        self.fill_level
    }

    pub fn nnz(&self) -> usize {
        self.lu.nnz()
    }

    /// Combined factors: strictly lower part is L (unit diagonal implied), the rest is U.
    pub fn factors(&self) -> &CsrMatrix {
        &self.lu
    }

    /// Solves `L U z = r`.
    pub fn solve(&self, r: &[f64]) -> Result<Vec<f64>> {
        let mut z = vec![0.0; r.len()];
        self.solve_into(r, &mut z)?;
        Ok(z)
    }

    pub fn solve_into(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let n = self.dim();
        check_len("ilu solve input", n, r.len())?;
        check_len("ilu solve output", n, z.len())?;
        let offs = self.lu.row_offsets();
        let cols = self.lu.col_indices();
        let vals = self.lu.values();
        for i in 0..n {
            let mut acc = r[i];
            for q in offs[i]..self.diag[i] {
                acc -= vals[q] * z[cols[q]];
            }
            z[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for q in self.diag[i] + 1..offs[i + 1] {
                acc -= vals[q] * z[cols[q]];
            }
            z[i] = acc / vals[self.diag[i]];
        }
        Ok(())
    }
}
