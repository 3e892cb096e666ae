use super::IndexSet;
use crate::error::{check_len, GpcgError, Result};

/// Compressed sparse row matrix with column indices sorted within each row.
///
/// Symmetric matrices are stored with both triangles present.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, validating the layout.
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != nrows + 1 {
            return Err(GpcgError::InvalidStructure(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                nrows + 1
            )));
        }
        if row_offsets[0] != 0 {
            return Err(GpcgError::InvalidStructure(
                "row_offsets[0] must be 0".into(),
            ));
        }
        if col_indices.len() != values.len() || row_offsets[nrows] != values.len() {
            return Err(GpcgError::InvalidStructure(format!(
                "row_offsets[nrows] = {}, col_indices {} and values {} disagree",
                row_offsets[nrows],
                col_indices.len(),
                values.len()
            )));
        }
        for i in 0..nrows {
            let (start, end) = (row_offsets[i], row_offsets[i + 1]);
            if start > end {
                return Err(GpcgError::InvalidStructure(format!(
                    "row_offsets decreases at row {i}"
                )));
            }
            let cols = &col_indices[start..end];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GpcgError::InvalidStructure(format!(
                    "column indices of row {i} are not strictly increasing"
                )));
            }
            if let Some(&last) = cols.last() {
                if last >= ncols {
                    return Err(GpcgError::IndexOutOfRange {
                        index: last,
                        dim: ncols,
                    });
                }
            }
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Assembles from `(row, col, value)` triplets in any order; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(r, c, _) in triplets {
            if r >= nrows {
                return Err(GpcgError::IndexOutOfRange { index: r, dim: nrows });
            }
            if c >= ncols {
                return Err(GpcgError::IndexOutOfRange { index: c, dim: ncols });
            }
            counts[r + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut entries = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            entries[next[r]] = (c, v);
            next[r] += 1;
        }

        let mut row_offsets = Vec::with_capacity(nrows + 1);
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        for i in 0..nrows {
            let row = &mut entries[counts[i]..counts[i + 1]];
            // stable, so duplicates are summed in input order
            row.sort_by_key(|e| e.0);
            for &(c, v) in row.iter() {
                if col_indices.len() > row_offsets[i] && *col_indices.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Dense row-major input; exact zeros are not stored.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            check_len("from_dense row", ncols, row.len())?;
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (i, row) in out.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        out
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[s..e], &self.values[s..e])
    }

    /// Stored value at `(i, j)`, zero when the entry is not in the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |p| vals[p])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    /// Checks that `(i, j)` is stored iff `(j, i)` is, with bitwise equal values.
    pub fn check_symmetric(&self) -> Result<()> {
        if self.nrows != self.ncols {
            return Err(GpcgError::DimensionMismatch {
                context: "symmetry check",
                expected: self.nrows,
                actual: self.ncols,
            });
        }
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let (tcols, tvals) = self.row(j);
                match tcols.binary_search(&i) {
                    Ok(p) if tvals[p].to_bits() == v.to_bits() => {}
                    _ => return Err(GpcgError::NotSymmetric { row: i, col: j }),
                }
            }
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.check_symmetric().is_ok()
    }

    pub fn mat_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.nrows];
        self.mat_vec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y <- A x`, summing each row left to right.
    pub fn mat_vec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_len("mat_vec input", self.ncols, x.len())?;
        check_len("mat_vec output", self.nrows, y.len())?;
        for (i, yi) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_offsets[i], self.row_offsets[i + 1]);
            let mut acc = 0.0;
            for k in s..e {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *yi = acc;
        }
        Ok(())
    }

    /// `B[p, q] = A[rows[p], cols[q]]`, keeping only entries stored in `A`.
    pub fn extract_submatrix(&self, rows: &IndexSet, cols: &IndexSet) -> Result<CsrMatrix> {
        if let Some(&r) = rows.as_slice().last() {
            if r >= self.nrows {
                return Err(GpcgError::IndexOutOfRange { index: r, dim: self.nrows });
            }
        }
        if let Some(&c) = cols.as_slice().last() {
            if c >= self.ncols {
                return Err(GpcgError::IndexOutOfRange { index: c, dim: self.ncols });
            }
        }
        let mut col_map = vec![usize::MAX; self.ncols];
        for (q, c) in cols.iter().enumerate() {
            col_map[c] = q;
        }
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for r in rows.iter() {
            let (rc, rv) = self.row(r);
            for (&c, &v) in rc.iter().zip(rv) {
                let q = col_map[c];
                if q != usize::MAX {
                    col_indices.push(q);
                    values.push(v);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(CsrMatrix {
            nrows: rows.len(),
            ncols: cols.len(),
            row_offsets,
            col_indices,
            values,
        })
    }
}
