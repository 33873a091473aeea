use nalgebra::DMatrix;

use super::{columns_to_matrix, reorthogonalize, ProcessOptions, ZeroTest};
use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::vector::{norm, Vector};

/// Which normalization vanished when the bidiagonalization stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationSide {
    /// `α_{k₀+1} = 0`: happens when `b ∉ ran(A)`.
    AlphaZero,
    /// `β_{k₀+1} = 0`: happens when `b ∈ ran(A)`.
    BetaZero,
}

/// Golub–Kahan bidiagonalization:
///
/// ```text
/// β₁u₁ = b,  α₁v₁ = Aᵀu₁,
/// β_{j+1}u_{j+1} = A v_j − α_j u_j,
/// α_{j+1}v_{j+1} = Aᵀu_{j+1} − β_{j+1}v_j.
/// ```
///
/// After `new` the state holds `(u₁, v₁)`; [`step`](Self::step) advances to
/// `(u_{j+1}, v_{j+1})`.
#[derive(Debug, Clone)]
pub struct GolubKahan<'a> {
    op: &'a LinearOperator,
    opts: ProcessOptions,
    zero: ZeroTest,
    j: usize,
    u: Vector,
    v: Vector,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    basis_u: Vec<Vector>,
    basis_v: Vec<Vector>,
    terminated: Option<(usize, TerminationSide)>,
}

impl<'a> GolubKahan<'a> {
    pub fn new(op: &'a LinearOperator, b: &Vector, opts: ProcessOptions) -> Result<Self> {
        if b.len() != op.n() {
            return Err(Error::DimensionMismatch {
                expected: op.n(),
                found: b.len(),
            });
        }
        let beta1 = norm(b);
        if beta1 == 0.0 {
            return Err(Error::InvalidArgument(
                "right-hand side must be nonzero".into(),
            ));
        }
        let u = b / beta1;
        let mut v = op.apply_transpose(&u)?;
        let alpha1 = norm(&v);
        let mut gk = Self {
            op,
            opts,
            zero: ZeroTest::new(opts.breakdown_tol, beta1),
            j: 1,
            u,
            v: Vector::zeros(op.n()),
            alphas: Vec::new(),
            betas: vec![beta1],
            basis_u: Vec::new(),
            basis_v: Vec::new(),
            terminated: None,
        };
        if opts.keeps_basis() {
            gk.basis_u.push(gk.u.clone());
        }
        if gk.zero.is_zero(alpha1) {
            gk.alphas.push(0.0);
            gk.j = 0;
            gk.terminated = Some((0, TerminationSide::AlphaZero));
        } else {
            v /= alpha1;
            gk.alphas.push(alpha1);
            if opts.keeps_basis() {
                gk.basis_v.push(v.clone());
            }
            gk.v = v;
        }
        Ok(gk)
    }

    /// Computes `β_{j+1}` and, if it is nonzero, `α_{j+1}`. Returns the pair
    /// (`α_{j+1}` is `None` when `β_{j+1} = 0`).
    pub fn step(&mut self) -> Result<(f64, Option<f64>)> {
        if let Some((k0, _)) = self.terminated {
            return Err(Error::ProcessTerminated {
                process: "Golub–Kahan",
                step: k0,
            });
        }
        let j = self.j;
        let mut p = self.op.apply(&self.v)?;
        p.axpy(-self.alphas[j - 1], &self.u, 1.0);
        if self.opts.reorthogonalize {
            reorthogonalize(&mut p, &self.basis_u);
        }
        let beta = norm(&p);
        if self.zero.is_zero(beta) {
            self.betas.push(0.0);
            self.terminated = Some((j, TerminationSide::BetaZero));
            return Ok((0.0, None));
        }
        self.betas.push(beta);
        self.u = p / beta;
        if self.opts.keeps_basis() {
            self.basis_u.push(self.u.clone());
        }

        let mut q = self.op.apply_transpose(&self.u)?;
        q.axpy(-beta, &self.v, 1.0);
        if self.opts.reorthogonalize {
            reorthogonalize(&mut q, &self.basis_v);
        }
        let alpha = norm(&q);
        if self.zero.is_zero(alpha) {
            self.alphas.push(0.0);
            self.terminated = Some((j, TerminationSide::AlphaZero));
            return Ok((beta, Some(0.0)));
        }
        self.alphas.push(alpha);
        self.v = q / alpha;
        if self.opts.keeps_basis() {
            self.basis_v.push(self.v.clone());
        }
        self.j += 1;
        Ok((beta, Some(alpha)))
    }

    pub fn run(&mut self, max_steps: usize) -> Result<()> {
        for _ in 0..max_steps {
            if self.is_terminated() {
                break;
            }
            self.step()?;
        }
        Ok(())
    }

    /// Number of complete `(u_j, v_j)` pairs.
    pub fn j(&self) -> usize {
        self.j
    }

    /// Newest `u` (this is `u_{j+1}` after an α-side termination).
    pub fn u(&self) -> &Vector {
        &self.u
    }

    /// `v_j`.
    pub fn v(&self) -> &Vector {
        &self.v
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated.is_some()
    }

    /// `(k₀, side)` once the process has stopped.
    pub fn termination(&self) -> Option<(usize, TerminationSide)> {
        self.terminated
    }

    pub fn basis_u(&self) -> Option<&[Vector]> {
        self.opts.keeps_basis().then_some(self.basis_u.as_slice())
    }

    pub fn basis_v(&self) -> Option<&[Vector]> {
        self.opts.keeps_basis().then_some(self.basis_v.as_slice())
    }

    /// Lower-bidiagonal `B_{j+1,j}`.
    pub fn b_rect(&self, j: usize) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(j + 1, j);
        for c in 0..j {
            b[(c, c)] = self.alphas[c];
            b[(c + 1, c)] = self.betas[c + 1];
        }
        b
    }

    pub fn u_matrix(&self) -> Option<DMatrix<f64>> {
        self.basis_u().map(|b| columns_to_matrix(self.op.n(), b))
    }

    pub fn v_matrix(&self) -> Option<DMatrix<f64>> {
        self.basis_v().map(|b| columns_to_matrix(self.op.n(), b))
    }
}
