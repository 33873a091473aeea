//! Linear operators: storage, structure flags, generators and file input.
//!
//! A [`LinearOperator`] is an immutable `n×n` real map that can apply both
//! `A` and `Aᵀ`. Its [`Structure`] records whether it is general, skew
//! (`Aᵀ = −A`) or shifted skew (`A = αI + S`). Shifted operators keep `α` and
//! `S` separately and never materialize `αI + S`, so the transpose is applied
//! exactly as `αx − Sx`.

mod csr;
mod generators;
mod matrix_market;

use nalgebra::DMatrix;

pub use csr::CsrMatrix;
pub use generators::{
    conv2d_skew, example_rhs, random_rhs, random_singular_skew, random_skew, tridiag_skew, RhsKind,
};
pub use matrix_market::{
    load_matrix_market, read_vector, write_matrix_market, write_vector, LoadOptions,
};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// Relative tolerance used when validating skew structure:
/// `max|A + Aᵀ| ≤ tol · max|A|`.
pub const DEFAULT_SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Structure {
    General,
    Skew,
    ShiftedSkew { alpha: f64 },
}

impl Structure {
    pub fn name(&self) -> &'static str {
        match self {
            Structure::General => "general",
            Structure::Skew => "skew-symmetric",
            Structure::ShiftedSkew { .. } => "shifted skew-symmetric",
        }
    }
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(DMatrix<f64>),
    Csr(CsrMatrix),
    Shifted {
        alpha: f64,
        skew: Box<LinearOperator>,
    },
}

#[derive(Debug, Clone)]
pub struct LinearOperator {
    n: usize,
    storage: Storage,
    structure: Structure,
}

impl LinearOperator {
    pub fn from_dense(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "matrix has non-finite entries".into(),
            ));
        }
        Ok(Self {
            n: m.nrows(),
            storage: Storage::Dense(m),
            structure: Structure::General,
        })
    }

    pub fn from_csr(m: CsrMatrix) -> Self {
        Self {
            n: m.n(),
            storage: Storage::Csr(m),
            structure: Structure::General,
        }
    }

    /// Flags the operator as skew without checking. Callers guarantee the
    /// structure by construction.
    pub(crate) fn assume_skew(mut self) -> Self {
        self.structure = Structure::Skew;
        self
    }

    /// Validates `max|A + Aᵀ| ≤ tol · max|A|` and flags the operator skew.
    pub fn into_skew(self, tol: f64) -> Result<Self> {
        let asymmetry = self.max_symmetric_part();
        let bound = tol * self.max_abs_entry();
        if asymmetry <= bound {
            Ok(self.assume_skew())
        } else {
            Err(Error::NotSkew {
                asymmetry,
                tol,
                bound,
            })
        }
    }

    /// Flags the operator skew when it passes validation, otherwise leaves it
    /// general.
    pub fn detect_skew(self, tol: f64) -> Self {
        if self.structure != Structure::General {
            return self;
        }
        let asymmetry = self.max_symmetric_part();
        if asymmetry <= tol * self.max_abs_entry() {
            self.assume_skew()
        } else {
            self
        }
    }

    /// `A = αI + S`; `skew` must be skew-flagged and `α` nonzero.
    pub fn shifted(alpha: f64, skew: LinearOperator) -> Result<Self> {
        if skew.structure != Structure::Skew {
            return Err(Error::StructureMismatch {
                required: "skew-symmetric",
                found: skew.structure.name(),
            });
        }
        if alpha == 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shift must be finite and nonzero, got {alpha}"
            )));
        }
        Ok(Self {
            n: skew.n,
            storage: Storage::Shifted {
                alpha,
                skew: Box::new(skew),
            },
            structure: Structure::ShiftedSkew { alpha },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn is_skew(&self) -> bool {
        self.structure == Structure::Skew
    }

    /// `α` for shifted operators, `None` otherwise.
    pub fn shift(&self) -> Option<f64> {
        match self.structure {
            Structure::ShiftedSkew { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// The skew part `S`: the operator itself when skew, the stored `S` when
    /// shifted.
    pub fn skew_part(&self) -> Option<&LinearOperator> {
        match (&self.storage, self.structure) {
            (Storage::Shifted { skew, .. }, _) => Some(skew),
            (_, Structure::Skew) => Some(self),
            _ => None,
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        self.check_len(x.len())?;
        let mut y = Vector::zeros(self.n);
        self.apply_into(x.as_slice(), y.as_mut_slice());
        Ok(y)
    }

    pub fn apply_transpose(&self, x: &Vector) -> Result<Vector> {
        self.check_len(x.len())?;
        let mut y = Vector::zeros(self.n);
        self.apply_transpose_into(x.as_slice(), y.as_mut_slice());
        Ok(y)
    }

    /// `y = A x` without length checks; slices must have length `n`.
    pub(crate) fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        match &self.storage {
            Storage::Dense(m) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi = (0..self.n).map(|j| m[(i, j)] * x[j]).sum();
                }
            }
            Storage::Csr(m) => m.mul_into(x, y),
            Storage::Shifted { alpha, skew } => {
                skew.apply_into(x, y);
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi += alpha * xi;
                }
            }
        }
    }

    /// `y = Aᵀ x` without length checks.
    pub(crate) fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        match (&self.storage, self.structure) {
            (Storage::Shifted { alpha, skew }, _) => {
                skew.apply_into(x, y);
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi = alpha * xi - *yi;
                }
            }
            (_, Structure::Skew) => {
                self.apply_into(x, y);
                y.iter_mut().for_each(|v| *v = -*v);
            }
            (Storage::Dense(m), _) => {
                for (j, yj) in y.iter_mut().enumerate() {
                    *yj = (0..self.n).map(|i| m[(i, j)] * x[i]).sum();
                }
            }
            (Storage::Csr(m), _) => m.mul_transpose_into(x, y),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Csr(m) => m.to_dense(),
            Storage::Shifted { alpha, skew } => {
                let mut d = skew.to_dense();
                for i in 0..self.n {
                    d[(i, i)] += alpha;
                }
                d
            }
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().fold(0.0_f64, |a, v| a.max(v.abs())),
            Storage::Csr(m) => m.max_abs(),
            Storage::Shifted { alpha, skew } => skew.max_abs_entry().max(alpha.abs()),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => crate::vector::norm2(m.as_slice()),
            Storage::Csr(m) => m.frobenius_norm(),
            Storage::Shifted { alpha, skew } => {
                let s = skew.frobenius_norm();
                (s * s + alpha * alpha * self.n as f64).sqrt()
            }
        }
    }

    /// `max|A + Aᵀ|`.
    pub fn max_symmetric_part(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => {
                let mut worst = 0.0_f64;
                for i in 0..self.n {
                    for j in i..self.n {
                        worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
                    }
                }
                worst
            }
            Storage::Csr(m) => m.max_symmetric_part(),
            Storage::Shifted { alpha, skew } => {
                // diagonal contributes 2α
                (2.0 * alpha.abs()).max(skew.max_symmetric_part())
            }
        }
    }

    /// Stored entries as triplets (dense storage yields every nonzero).
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        match &self.storage {
            Storage::Csr(m) => m.entries().collect(),
            _ => {
                let d = self.to_dense();
                let mut t = Vec::new();
                for i in 0..self.n {
                    for j in 0..self.n {
                        if d[(i, j)] != 0.0 {
                            t.push((i, j, d[(i, j)]));
                        }
                    }
                }
                t
            }
        }
    }
}
