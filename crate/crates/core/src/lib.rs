//! Krylov subspace solvers for skew-symmetric (`Sᵀ = −S`) and shifted
//! skew-symmetric (`A = αI + S`, `α ≠ 0`) linear systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`operators`]: the [`LinearOperator`] abstraction, CSR/dense storage,
//!   test-matrix generators and Matrix Market I/O.
//! - [`factorizations`]: the three basis-generating processes (skew Lanczos,
//!   Golub–Kahan, Saunders–Simon–Yip) as resumable step machines, plus
//!   checkers for the relations between them.
//! - [`skew_solvers`]: S²CG, S²MR, CRAIG and LSQR.
//! - [`shifted_solvers`]: S³CG, S³MR, S³LQ and USYMLQ/USYMQR.
//! - [`oracle`]: dense brute-force references used to validate everything
//!   above at desk scale.
//!
//! Every solver returns a [`ConvergenceHistory`] holding one
//! [`IterationRecord`] per iterate and a final [`Outcome`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod equivalence;
pub mod error;
pub mod factorizations;
pub mod history;
pub mod operators;
pub mod oracle;
mod recurrences;
pub mod rng;
pub mod shifted_solvers;
pub mod skew_solvers;
pub mod vector;

pub use error::{Error, Result};
pub use history::{ConvergenceHistory, IterationRecord, Method, Outcome, SolverConfig};
pub use operators::{LinearOperator, Structure};
pub use vector::Vector;
