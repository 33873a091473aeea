//! Matrix Market coordinate files (real or integer; general, symmetric or
//! skew-symmetric) and one-value-per-line vector files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CsrMatrix, LinearOperator, DEFAULT_SKEW_TOL};
use crate::error::{Error, Result};
use crate::vector::{format_vector, parse_vector, Vector};

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    /// Fail unless the matrix validates as skew.
    pub require_skew: bool,
    /// Relative tolerance for the post-hoc skew check on general files.
    pub skew_tol: f64,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            require_skew: false,
            skew_tol: DEFAULT_SKEW_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn load_matrix_market(path: impl AsRef<Path>, opts: LoadOptions) -> Result<LinearOperator> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file".into()))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(
            hline,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'".into(),
        ));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(
            hline,
            format!("unsupported format {:?}", tokens[2]),
        ));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(
            hline,
            format!("unsupported field {:?}", tokens[3]),
        ));
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(hline, format!("unsupported symmetry {other:?}"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines {
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected 'rows cols nnz'".into()));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|e| parse_err(lineno, format!("invalid size {s:?}: {e}")))
                };
                let (r, c, nnz) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if r != c {
                    return Err(Error::NotSquare { rows: r, cols: c });
                }
                if r == 0 {
                    return Err(parse_err(
                        lineno,
                        "matrix dimension must be positive".into(),
                    ));
                }
                size = Some((r, c, nnz));
                triplets.reserve(nnz);
            }
            Some((n, _, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "expected 'row col value'".into()));
                }
                let idx = |s: &str| -> Result<usize> {
                    let v = s
                        .parse::<usize>()
                        .map_err(|e| parse_err(lineno, format!("invalid index {s:?}: {e}")))?;
                    if v == 0 || v > n {
                        return Err(parse_err(lineno, format!("index {v} out of range 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let (i, j) = (idx(fields[0])?, idx(fields[1])?);
                let v: f64 = fields[2].parse().map_err(|e| {
                    parse_err(lineno, format!("invalid value {:?}: {e}", fields[2]))
                })?;
                if !v.is_finite() {
                    return Err(parse_err(lineno, format!("non-finite value {v}")));
                }
                match symmetry {
                    Symmetry::General => triplets.push((i, j, v)),
                    Symmetry::Symmetric => {
                        if i < j {
                            return Err(parse_err(
                                lineno,
                                "symmetric files store the lower triangle only".into(),
                            ));
                        }
                        triplets.push((i, j, v));
                        if i != j {
                            triplets.push((j, i, v));
                        }
                    }
                    Symmetry::SkewSymmetric => {
                        if i <= j {
                            return Err(parse_err(
                                lineno,
                                "skew-symmetric files store the strict lower triangle only".into(),
                            ));
                        }
                        triplets.push((i, j, v));
                        triplets.push((j, i, -v));
                    }
                }
            }
        }
    }

    let (n, _, nnz) = size.ok_or_else(|| parse_err(hline, "missing size line".into()))?;
    let stored = match symmetry {
        Symmetry::General => triplets.len(),
        _ => triplets.iter().filter(|(i, j, _)| i >= j).count(),
    };
    if stored != nnz {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {nnz} entries, found {stored}"),
        ));
    }

    let op = LinearOperator::from_csr(CsrMatrix::from_triplets(n, &triplets));
    match symmetry {
        Symmetry::SkewSymmetric => Ok(op.assume_skew()),
        _ if opts.require_skew => op.into_skew(opts.skew_tol),
        _ => Ok(op.detect_skew(opts.skew_tol)),
    }
}

/// Writes a coordinate file. Skew operators use the `skew-symmetric`
/// qualifier and store only the strict lower triangle; everything else is
/// written `general`. Values use the shortest round-trip representation.
pub fn write_matrix_market(op: &LinearOperator, path: impl AsRef<Path>) -> Result<()> {
    let triplets = op.triplets();
    let skew = op.is_skew();
    let kept: Vec<_> = triplets
        .into_iter()
        .filter(|(i, j, _)| !skew || i > j)
        .collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "%%MatrixMarket matrix coordinate real {}",
        if skew { "skew-symmetric" } else { "general" }
    );
    let _ = writeln!(out, "{} {} {}", op.n(), op.n(), kept.len());
    for (i, j, v) in kept {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vector> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_vector(&text).map_err(|(line, message)| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

pub fn write_vector(v: &Vector, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_vector(v))?;
    Ok(())
}
