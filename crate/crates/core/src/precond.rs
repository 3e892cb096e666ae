//! Preconditioners for the reduced systems: none, point Jacobi, and block Jacobi with an
//! ILU(k) factorization of each diagonal block.
//!
//! Blocks are contiguous index ranges whose sizes differ by at most one, which mimics the
//! one-block-per-processor layout of a row-distributed matrix.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, GpcgError, Result};
use crate::ilu::{ilu_k, IluFactorization};
use crate::linalg::{CsrMatrix, IndexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PreconditionerKind {
    None,
    Jacobi,
    BlockJacobiIlu { fill: usize },
}

impl fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::Jacobi => f.write_str("jacobi"),
            Self::BlockJacobiIlu { fill } => write!(f, "bjacobi-ilu{fill}"),
        }
    }
}

impl FromStr for PreconditionerKind {
    type Err = GpcgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "jacobi" => Ok(Self::Jacobi),
            _ => s
                .strip_prefix("bjacobi-ilu")
                .and_then(|k| k.parse().ok())
                .map(|fill| Self::BlockJacobiIlu { fill })
                .ok_or_else(|| GpcgError::InvalidConfig(format!("unknown preconditioner {s:?}"))),
        }
    }
}

impl TryFrom<String> for PreconditionerKind {
    type Error = GpcgError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PreconditionerKind> for String {
    fn from(k: PreconditionerKind) -> String {
        k.to_string()
    }
}

/// A preconditioner selection string: `none | jacobi | bjacobi-ilu<k>`, optionally followed
/// by `:blocks=<p>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreconditionerSpec {
    pub kind: PreconditionerKind,
    pub blocks: Option<usize>,
}

impl FromStr for PreconditionerSpec {
    type Err = GpcgError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, suffix) = match s.split_once(':') {
            Some((name, suffix)) => (name, Some(suffix)),
            None => (s, None),
        };
        let kind = name.trim().parse()?;
        let blocks = match suffix {
            None => None,
            Some(sfx) => {
                let p: usize = sfx
                    .trim()
                    .strip_prefix("blocks=")
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| GpcgError::InvalidConfig(format!("bad preconditioner suffix {sfx:?}")))?;
                if p == 0 {
                    return Err(GpcgError::InvalidConfig("blocks must be at least 1".into()));
                }
                Some(p)
            }
        };
        Ok(Self { kind, blocks })
    }
}

impl fmt::Display for PreconditionerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.blocks {
            Some(p) => write!(f, "{}:blocks={p}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

/// Splits `0..n` into `blocks` contiguous ranges (fewer if `n < blocks`) whose sizes differ by
/// at most one; larger blocks come first.
pub fn block_ranges(n: usize, blocks: usize) -> Vec<Range<usize>> {
    let p = blocks.clamp(1, n.max(1));
    let (base, extra) = (n / p, n % p);
    let mut start = 0;
    (0..p)
        .map(|b| {
            let len = base + usize::from(b < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

#[derive(Debug, Clone)]
pub enum Preconditioner {
    None { dim: usize },
    PointJacobi { inv_diag: Vec<f64> },
    BlockJacobiIlu {
        ranges: Vec<Range<usize>>,
        factors: Vec<IluFactorization>,
    },
}

impl Preconditioner {
    pub fn build(kind: PreconditionerKind, blocks: usize, m: &CsrMatrix) -> Result<Self> {
        let n = m.nrows();
        check_len("preconditioner (square)", n, m.ncols())?;
        match kind {
            PreconditionerKind::None => Ok(Self::None { dim: n }),
            PreconditionerKind::Jacobi => {
                let diag = m.diagonal();
                let mut inv_diag = Vec::with_capacity(n);
                for (i, d) in diag.into_iter().enumerate() {
                    if d <= 0.0 || !d.is_finite() {
                        return Err(GpcgError::NotPositiveDefinite { column: i, pivot: d });
                    }
                    inv_diag.push(1.0 / d);
                }
                Ok(Self::PointJacobi { inv_diag })
            }
            PreconditionerKind::BlockJacobiIlu { fill } => {
                let ranges = block_ranges(n, blocks);
                let mut factors = Vec::with_capacity(ranges.len());
                for r in &ranges {
                    let block = if ranges.len() == 1 {
                        m.clone()
                    } else {
                        let idx = IndexSet::range(r.start, r.end, n)?;
                        m.extract_submatrix(&idx, &idx)?
                    };
                    factors.push(ilu_k(&block, fill).map_err(|e| match e {
                        GpcgError::ZeroPivot { row } => GpcgError::ZeroPivot { row: row + r.start },
                        other => other,
                    })?);
                }
                Ok(Self::BlockJacobiIlu { ranges, factors })
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::None { dim } => *dim,
            Self::PointJacobi { inv_diag } => inv_diag.len(),
            Self::BlockJacobiIlu { ranges, .. } => ranges.last().map_or(0, |r| r.end),
        }
    }

    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let mut z = vec![0.0; r.len()];
        self.apply_into(r, &mut z)?;
        Ok(z)
    }

    /// `z <- M⁻¹ r`
    pub fn apply_into(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        check_len("preconditioner input", self.dim(), r.len())?;
        check_len("preconditioner output", self.dim(), z.len())?;
        match self {
            Self::None { .. } => z.copy_from_slice(r),
            Self::PointJacobi { inv_diag } => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(inv_diag) {
                    *zi = ri * di;
                }
            }
            Self::BlockJacobiIlu { ranges, factors } => {
                for (range, f) in ranges.iter().zip(factors) {
                    f.solve_into(&r[range.clone()], &mut z[range.clone()])?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_selection_strings() {
        let s: PreconditionerSpec = "bjacobi-ilu2:blocks=16".parse().unwrap();
        assert_eq!(s.kind, PreconditionerKind::BlockJacobiIlu { fill: 2 });
        assert_eq!(s.blocks, Some(16));
        assert_eq!(s.to_string(), "bjacobi-ilu2:blocks=16");
        let s: PreconditionerSpec = "jacobi".parse().unwrap();
        assert_eq!(s.kind, PreconditionerKind::Jacobi);
        assert_eq!(s.blocks, None);
        assert_eq!("none".parse::<PreconditionerKind>().unwrap(), PreconditionerKind::None);
        assert!("ilu".parse::<PreconditionerSpec>().is_err());
        assert!("jacobi:blocks=0".parse::<PreconditionerSpec>().is_err());
        assert!("jacobi:foo=2".parse::<PreconditionerSpec>().is_err());
    }

    #[test]
    fn block_ranges_partition_evenly() {
        for n in 0..40 {
            for p in 1..10 {
                let r = block_ranges(n, p);
                assert_eq!(r.first().unwrap().start, 0);
                assert_eq!(r.last().unwrap().end, n);
                for w in r.windows(2) {
                    assert_eq!(w[0].end, w[1].start);
                }
                let lens: Vec<usize> = r.iter().map(|x| x.len()).collect();
                let (mn, mx) = (lens.iter().min().unwrap(), lens.iter().max().unwrap());
                assert!(mx - mn <= 1);
            }
        }
    }

    #[test]
    fn trivial_applications() {
        let m = CsrMatrix::from_dense(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap();
        let none = Preconditioner::build(PreconditionerKind::None, 1, &m).unwrap();
        assert_eq!(none.apply(&[2.0, 4.0]).unwrap(), vec![2.0, 4.0]);
        let jac = Preconditioner::build(PreconditionerKind::Jacobi, 1, &m).unwrap();
        assert_eq!(jac.apply(&[2.0, 4.0]).unwrap(), vec![1.0, 1.0]);
        assert!(jac.apply(&[1.0]).is_err());
    }

    #[test]
    fn single_block_full_fill_is_exact_solve() {
        let d = vec![
            vec![4.0, -1.0, 0.0, -1.0],
            vec![-1.0, 4.0, -1.0, 0.0],
            vec![0.0, -1.0, 4.0, -1.0],
            vec![-1.0, 0.0, -1.0, 4.0],
        ];
        let m = CsrMatrix::from_dense(&d).unwrap();
        let p = Preconditioner::build(PreconditionerKind::BlockJacobiIlu { fill: 8 }, 1, &m).unwrap();
        let r = [1.0, -2.0, 0.5, 3.0];
        let z = p.apply(&r).unwrap();
        let oracle = crate::oracle::dense_solve(&d, &r).unwrap();
        for i in 0..4 {
            assert!((z[i] - oracle[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn blocks_ignore_off_block_coupling() {
        let d = vec![
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ];
        let m = CsrMatrix::from_dense(&d).unwrap();
        let p = Preconditioner::build(PreconditionerKind::BlockJacobiIlu { fill: 0 }, 2, &m).unwrap();
        // blocks {0,1} and {2}
        let z = p.apply(&[1.0, 1.0, 2.0]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-15 && (z[1] - 1.0).abs() < 1e-15);
        assert_eq!(z[2], 1.0);
    }
}
