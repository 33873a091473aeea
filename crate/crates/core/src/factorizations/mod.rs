//! Basis-generating processes as resumable single-step machines:
//! skew Lanczos tridiagonalization, Golub–Kahan bidiagonalization and
//! Saunders–Simon–Yip tridiagonalization, plus checkers for the relations
//! that tie them together on (shifted) skew operators.

mod checks;
mod golub_kahan;
mod lanczos;
mod ssy;

pub use checks::{
    check_gk_lanczos_equivalence, check_ssy_lanczos_equivalence, d_sign, d_tilde_sign,
    lanczos_recurrence_residual, sign_matrix_d, sign_matrix_d_tilde, termination_parity, Parity,
    ParityReport,
};
pub use golub_kahan::{GolubKahan, TerminationSide};
pub use lanczos::Lanczos;
pub use ssy::{Ssy, SsyTermination};

use crate::history::SolverConfig;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy)]
pub struct ProcessOptions {
    pub breakdown_tol: f64,
    pub store_basis: bool,
    /// Full reorthogonalization against the stored basis (forces storage).
    pub reorthogonalize: bool,
}

impl Default for ProcessOptions {
    fn default() -> Self {
        Self {
            breakdown_tol: 1e-13,
            store_basis: false,
            reorthogonalize: false,
        }
    }
}

impl ProcessOptions {
    pub fn stored() -> Self {
        Self {
            store_basis: true,
            ..Self::default()
        }
    }

    pub fn reorthogonalized() -> Self {
        Self {
            store_basis: true,
            reorthogonalize: true,
            ..Self::default()
        }
    }

    fn keeps_basis(&self) -> bool {
        self.store_basis || self.reorthogonalize
    }
}

impl From<&SolverConfig> for ProcessOptions {
    fn from(cfg: &SolverConfig) -> Self {
        Self {
            breakdown_tol: cfg.breakdown_tol,
            store_basis: cfg.store_basis,
            reorthogonalize: cfg.reorthogonalize,
        }
    }
}

/// Decides when a normalization is zero: `norm ≤ tol·max(1, ‖b‖, largest
/// norm accepted so far)`.
#[derive(Debug, Clone)]
pub(crate) struct ZeroTest {
    tol: f64,
    scale: f64,
}

impl ZeroTest {
    pub fn new(tol: f64, rhs_norm: f64) -> Self {
        Self {
            tol,
            scale: rhs_norm.max(1.0),
        }
    }

    pub fn is_zero(&mut self, norm: f64) -> bool {
        if norm <= self.tol * self.scale {
            true
        } else {
            self.scale = self.scale.max(norm);
            false
        }
    }
}

/// Two passes of classical Gram–Schmidt against `basis`.
pub(crate) fn reorthogonalize(v: &mut Vector, basis: &[Vector]) {
    for _ in 0..2 {
        for q in basis {
            let h = q.dot(v);
            v.axpy(-h, q, 1.0);
        }
    }
}

pub(crate) fn columns_to_matrix(n: usize, cols: &[Vector]) -> nalgebra::DMatrix<f64> {
    if cols.is_empty() {
        nalgebra::DMatrix::zeros(n, 0)
    } else {
        nalgebra::DMatrix::from_columns(cols)
    }
}
