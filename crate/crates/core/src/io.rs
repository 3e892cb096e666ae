//! File formats.
//!
//! * Matrices: Matrix Market coordinate format, `real`/`integer`/`pattern` fields with
//!   `general` or `symmetric` symmetry. Symmetric files store the lower triangle.
//! * Vectors: plain text with one value per line (`inf`/`-inf` allowed, `%` or `#` comments),
//!   or a binary layout of the magic bytes `GPCGVEC1`, a little-endian `u64` length and the
//!   values as little-endian `f64`. Readers detect the binary form by its magic.
//! * Problems: a JSON manifest naming the matrix and vector files (paths relative to the
//!   manifest) and carrying the scalar `c`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{GpcgError, Result};
use crate::linalg::CsrMatrix;
use crate::qp::BoundQP;

pub const VECTOR_MAGIC: &[u8; 8] = b"GPCGVEC1";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GpcgError + '_ {
    move |source| GpcgError::Io { path: path.to_path_buf(), source }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> GpcgError {
    GpcgError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
}

pub fn parse_matrix_market(text: &str, path: &Path) -> Result<CsrMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(path, 1, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(path, 1, format!("unsupported format {:?}", tokens[2])));
    }
    let pattern = match tokens[3].as_str() {
        "real" | "double" | "integer" => false,
        "pattern" => true,
        other => return Err(parse_err(path, 1, format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        other => return Err(parse_err(path, 1, format!("unsupported symmetry {other:?}"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data.next().ok_or_else(|| parse_err(path, 2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(path, size_line + 1, format!("bad size line: {e}")))?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(parse_err(path, size_line + 1, "size line needs 'rows cols entries'"));
    };
    if symmetry == MmSymmetry::Symmetric && nrows != ncols {
        return Err(parse_err(path, size_line + 1, "symmetric matrix must be square"));
    }

    let mut triplets = Vec::with_capacity(if symmetry == MmSymmetry::Symmetric { 2 * nnz } else { nnz });
    let mut seen = 0;
    for (lineno, line) in data {
        let lineno = lineno + 1;
        let mut it = line.split_whitespace();
        let mut index = |what: &str, dim: usize| -> Result<usize> {
            let tok = it.next().ok_or_else(|| parse_err(path, lineno, format!("missing {what} index")))?;
            let v: usize = tok.parse().map_err(|_| parse_err(path, lineno, format!("bad {what} index {tok:?}")))?;
            if v == 0 || v > dim {
                return Err(parse_err(path, lineno, format!("{what} index {v} outside 1..={dim}")));
            }
            Ok(v - 1)
        };
        let r = index("row", nrows)?;
        let c = index("column", ncols)?;
        let v = if pattern {
            1.0
        } else {
            let tok = it.next().ok_or_else(|| parse_err(path, lineno, "missing value"))?;
            let v: f64 = tok.parse().map_err(|_| parse_err(path, lineno, format!("bad value {tok:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno, "matrix values must be finite"));
            }
            v
        };
        if it.next().is_some() {
            return Err(parse_err(path, lineno, "trailing tokens"));
        }
        if symmetry == MmSymmetry::Symmetric && c > r {
            return Err(parse_err(path, lineno, "symmetric files must store the lower triangle only"));
        }
        triplets.push((r, c, v));
        if symmetry == MmSymmetry::Symmetric && r != c {
            triplets.push((c, r, v));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_err(path, size_line + 1, format!("header declares {nnz} entries, found {seen}")));
    }
    CsrMatrix::from_triplets(nrows, ncols, &triplets)
}

pub fn read_matrix_market(path: &Path) -> Result<CsrMatrix> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_matrix_market(&text, path)
}

/// Serializes `a`; with `Symmetric`, only the lower triangle is written and `a` must be
/// symmetric.
pub fn format_matrix_market(a: &CsrMatrix, symmetry: MmSymmetry) -> Result<String> {
    if symmetry == MmSymmetry::Symmetric {
        a.check_symmetric()?;
    }
    let keep = |i: usize, j: usize| symmetry == MmSymmetry::General || j <= i;
    let count = (0..a.nrows()).map(|i| a.row(i).0.iter().filter(|&&j| keep(i, j)).count()).sum::<usize>();
    let mut out = String::new();
    out.push_str(match symmetry {
        MmSymmetry::General => "%%MatrixMarket matrix coordinate real general\n",
        MmSymmetry::Symmetric => "%%MatrixMarket matrix coordinate real symmetric\n",
    });
    out.push_str(&format!("{} {} {}\n", a.nrows(), a.ncols(), count));
    for i in 0..a.nrows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if keep(i, j) {
                out.push_str(&format!("{} {} {:e}\n", i + 1, j + 1, v));
            }
        }
    }
    Ok(out)
}

pub fn write_matrix_market(path: &Path, a: &CsrMatrix, symmetry: MmSymmetry) -> Result<()> {
    let text = format_matrix_market(a, symmetry)?;
    fs::write(path, text).map_err(io_err(path))
}

pub fn parse_vector_text(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("bad value {t:?}")))?;
        if v.is_nan() {
            return Err(parse_err(path, lineno + 1, "NaN is not allowed"));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn parse_vector_binary(bytes: &[u8], path: &Path) -> Result<Vec<f64>> {
    if bytes.len() < 16 || &bytes[..8] != VECTOR_MAGIC {
        return Err(parse_err(path, 0, "missing binary vector header"));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let body = &bytes[16..];
    if body.len() != len.saturating_mul(8) {
        return Err(parse_err(path, 0, format!("header declares {len} values, body holds {} bytes", body.len())));
    }
    let values: Vec<f64> = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(parse_err(path, 0, "NaN is not allowed"));
    }
    Ok(values)
}

/// Reads either vector format.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(VECTOR_MAGIC) {
        parse_vector_binary(&bytes, path)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| parse_err(path, 0, "vector file is not UTF-8 text"))?;
        parse_vector_text(&text, path)
    }
}

/// One value per line using the shortest representation that round-trips.
pub fn format_vector_text(v: &[f64]) -> String {
    let mut out = String::with_capacity(v.len() * 12);
    for x in v {
        out.push_str(&x.to_string());
        out.push('\n');
    }
    out
}

pub fn write_vector_text(path: &Path, v: &[f64]) -> Result<()> {
    fs::write(path, format_vector_text(v)).map_err(io_err(path))
}

pub fn encode_vector_binary(v: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * v.len());
    out.extend_from_slice(VECTOR_MAGIC);
    out.extend_from_slice(&(v.len() as u64).to_le_bytes());
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn write_vector_binary(path: &Path, v: &[f64]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(&encode_vector_binary(v)).map_err(io_err(path))
}

pub const MANIFEST_FORMAT: &str = "gpcg-problem";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemManifest {
    pub format: String,
    pub version: u32,
    pub n: usize,
    pub matrix: PathBuf,
    pub b: PathBuf,
    pub lower: PathBuf,
    pub upper: PathBuf,
    pub c: f64,
}

pub fn load_problem(manifest_path: &Path) -> Result<BoundQP> {
    let text = fs::read_to_string(manifest_path).map_err(io_err(manifest_path))?;
    let m: ProblemManifest = serde_json::from_str(&text)
        .map_err(|source| GpcgError::Manifest { path: manifest_path.to_path_buf(), source })?;
    if m.format != MANIFEST_FORMAT || m.version != 1 {
        return Err(parse_err(
            manifest_path,
            0,
            format!("unsupported manifest format {:?} version {}", m.format, m.version),
        ));
    }
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { dir.join(p) };
    let a = read_matrix_market(&resolve(&m.matrix))?;
    let b = read_vector(&resolve(&m.b))?;
    let lower = read_vector(&resolve(&m.lower))?;
    let upper = read_vector(&resolve(&m.upper))?;
    if a.nrows() != m.n {
        return Err(parse_err(manifest_path, 0, format!("manifest n = {} but matrix has {} rows", m.n, a.nrows())));
    }
    BoundQP::new(a, b, m.c, lower, upper)
}

/// Writes `A.mtx`, `b.txt`, `lower.txt`, `upper.txt` and `problem.json` into `dir`, returning
/// the manifest path.
pub fn save_problem(qp: &BoundQP, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let manifest = ProblemManifest {
        format: MANIFEST_FORMAT.into(),
        version: 1,
        n: qp.n(),
        matrix: "A.mtx".into(),
        b: "b.txt".into(),
        lower: "lower.txt".into(),
        upper: "upper.txt".into(),
        c: qp.constant(),
    };
    write_matrix_market(&dir.join(&manifest.matrix), qp.hessian(), MmSymmetry::Symmetric)?;
    write_vector_text(&dir.join(&manifest.b), qp.linear())?;
    write_vector_text(&dir.join(&manifest.lower), qp.lower())?;
    write_vector_text(&dir.join(&manifest.upper), qp.upper())?;
    let path = dir.join("problem.json");
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|source| GpcgError::Manifest { path: path.clone(), source })?;
    fs::write(&path, json + "\n").map_err(io_err(&path))?;
    Ok(path)
}
