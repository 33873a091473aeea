use nalgebra::DMatrix;

use super::{columns_to_matrix, reorthogonalize, ProcessOptions, ZeroTest};
use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::vector::{norm, Vector};

/// Skew Lanczos tridiagonalization:
///
/// ```text
/// γ₁w₁ = b,   γ_{k+1}w_{k+1} = S w_k + γ_k w_{k−1}
/// ```
///
/// so that `S W_k = W_{k+1} H_{k+1,k}` with `H` skew-tridiagonal
/// (`γ` below the diagonal, `−γ` above). After `new` the state holds `w₁`;
/// each [`step`](Self::step) produces `γ_{k+1}` and, unless it is zero,
/// `w_{k+1}`.
#[derive(Debug, Clone)]
pub struct Lanczos<'a> {
    op: &'a LinearOperator,
    negate: bool,
    opts: ProcessOptions,
    zero: ZeroTest,
    k: usize,
    w_prev: Vector,
    w_curr: Vector,
    gammas: Vec<f64>,
    basis: Vec<Vector>,
    grade: Option<usize>,
    work: Vector,
}

impl<'a> Lanczos<'a> {
    pub fn new(op: &'a LinearOperator, b: &Vector, opts: ProcessOptions) -> Result<Self> {
        Self::build(op, b, opts, false)
    }

    /// Runs the process on `−S` instead of `S`.
    pub(crate) fn negated(
        op: &'a LinearOperator,
        b: &Vector,
        opts: ProcessOptions,
    ) -> Result<Self> {
        Self::build(op, b, opts, true)
    }

    fn build(
        op: &'a LinearOperator,
        b: &Vector,
        opts: ProcessOptions,
        negate: bool,
    ) -> Result<Self> {
        if !op.is_skew() {
            return Err(Error::StructureMismatch {
                required: "skew",
                found: op.structure().name(),
            });
        }
        if b.len() != op.n() {
            return Err(Error::DimensionMismatch {
                expected: op.n(),
                found: b.len(),
            });
        }
        let gamma1 = norm(b);
        if gamma1 == 0.0 {
            return Err(Error::InvalidArgument(
                "right-hand side must be nonzero".into(),
            ));
        }
        let w1 = b / gamma1;
        let n = op.n();
        Ok(Self {
            op,
            negate,
            opts,
            zero: ZeroTest::new(opts.breakdown_tol, gamma1),
            k: 1,
            w_prev: Vector::zeros(n),
            basis: if opts.keeps_basis() {
                vec![w1.clone()]
            } else {
                Vec::new()
            },
            w_curr: w1,
            gammas: vec![gamma1],
            grade: None,
            work: Vector::zeros(n),
        })
    }

    /// Advances from `w_k` to `w_{k+1}` and returns `γ_{k+1}` (exactly 0 at
    /// termination, which records `ℓ = k`).
    pub fn step(&mut self) -> Result<f64> {
        if let Some(l) = self.grade {
            return Err(Error::ProcessTerminated {
                process: "Lanczos",
                step: l,
            });
        }
        let k = self.k;
        self.op
            .apply_into(self.w_curr.as_slice(), self.work.as_mut_slice());
        if self.negate {
            self.work.neg_mut();
        }
        self.work.axpy(self.gammas[k - 1], &self.w_prev, 1.0);
        if self.opts.reorthogonalize {
            reorthogonalize(&mut self.work, &self.basis);
        }
        let g = norm(&self.work);
        if self.zero.is_zero(g) {
            self.gammas.push(0.0);
            self.grade = Some(k);
            std::mem::swap(&mut self.w_prev, &mut self.w_curr);
            self.w_curr.fill(0.0);
            return Ok(0.0);
        }
        self.gammas.push(g);
        let next = &self.work / g;
        if self.opts.keeps_basis() {
            self.basis.push(next.clone());
        }
        self.w_prev = std::mem::replace(&mut self.w_curr, next);
        self.k += 1;
        Ok(g)
    }

    /// Steps until termination or until `max_steps` further steps were taken.
    pub fn run(&mut self, max_steps: usize) -> Result<()> {
        for _ in 0..max_steps {
            if self.is_terminated() {
                break;
            }
            self.step()?;
        }
        Ok(())
    }

    /// Index of the newest basis vector.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.op.n()
    }

    pub fn operator(&self) -> &'a LinearOperator {
        self.op
    }

    pub(crate) fn is_negated(&self) -> bool {
        self.negate
    }

    /// `w_k`; after termination the zero vector.
    pub fn current(&self) -> &Vector {
        &self.w_curr
    }

    /// `w_{k−1}`; after termination this is `w_ℓ`.
    pub fn previous(&self) -> &Vector {
        &self.w_prev
    }

    /// `γ₁, γ₂, …`.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// `γ_j`, 1-based.
    pub fn gamma(&self, j: usize) -> f64 {
        self.gammas[j - 1]
    }

    pub fn is_terminated(&self) -> bool {
        self.grade.is_some()
    }

    /// `ℓ` once the process has terminated.
    pub fn grade(&self) -> Option<usize> {
        self.grade
    }

    pub fn basis(&self) -> Option<&[Vector]> {
        self.opts.keeps_basis().then_some(self.basis.as_slice())
    }

    /// `W_k` as a dense `n × k` matrix (requires basis storage).
    pub fn basis_matrix(&self) -> Option<DMatrix<f64>> {
        self.basis().map(|b| columns_to_matrix(self.n(), b))
    }

    /// The `k × k` skew-tridiagonal `H_k` from the stored `γ` sequence.
    pub fn h_square(&self, k: usize) -> DMatrix<f64> {
        h_matrix(&self.gammas, k, k)
    }

    /// The `(k+1) × k` matrix `H_{k+1,k}`.
    pub fn h_rect(&self, k: usize) -> DMatrix<f64> {
        h_matrix(&self.gammas, k + 1, k)
    }
}

pub(crate) fn h_matrix(gammas: &[f64], rows: usize, cols: usize) -> DMatrix<f64> {
    assert!(
        gammas.len() >= rows.max(cols),
        "need γ up to index {} but only {} are known",
        rows.max(cols),
        gammas.len()
    );
    let mut h = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        if j + 1 < rows {
            h[(j + 1, j)] = gammas[j + 1];
        }
        if j >= 1 && j - 1 < rows {
            h[(j - 1, j)] = -gammas[j];
        }
    }
    h
}
