use nalgebra::DMatrix;

use super::{columns_to_matrix, reorthogonalize, ProcessOptions, ZeroTest};
use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::vector::{norm, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsyTermination {
    /// `β_{k+1} = 0` (and possibly `α_{k+1} = 0`): `AṼ_k = Ũ_k H̃_k`.
    BetaZero,
    /// Only `α_{k+1} = 0`.
    AlphaZero,
}

/// Saunders–Simon–Yip tridiagonalization:
///
/// ```text
/// β₁ũ₁ = b,  α₁ṽ₁ = c,
/// q = Aṽ_k − α_k ũ_{k−1},   θ_k = ũ_kᵀq,
/// β_{k+1}ũ_{k+1} = q − θ_k ũ_k,
/// α_{k+1}ṽ_{k+1} = Aᵀũ_k − β_k ṽ_{k−1} − θ_k ṽ_k.
/// ```
#[derive(Debug, Clone)]
pub struct Ssy<'a> {
    op: &'a LinearOperator,
    opts: ProcessOptions,
    zero: ZeroTest,
    k: usize,
    u_prev: Vector,
    u: Vector,
    v_prev: Vector,
    v: Vector,
    alphas: Vec<f64>,
    betas: Vec<f64>,
    thetas: Vec<f64>,
    basis_u: Vec<Vector>,
    basis_v: Vec<Vector>,
    terminated: Option<(usize, SsyTermination)>,
}

impl<'a> Ssy<'a> {
    pub fn new(
        op: &'a LinearOperator,
        b: &Vector,
        c: &Vector,
        opts: ProcessOptions,
    ) -> Result<Self> {
        for x in [b, c] {
            if x.len() != op.n() {
                return Err(Error::DimensionMismatch {
                    expected: op.n(),
                    found: x.len(),
                });
            }
        }
        let (beta1, alpha1) = (norm(b), norm(c));
        if beta1 == 0.0 || alpha1 == 0.0 {
            return Err(Error::InvalidArgument("b and c must be nonzero".into()));
        }
        let n = op.n();
        let u = b / beta1;
        let v = c / alpha1;
        let keep = opts.keeps_basis();
        Ok(Self {
            op,
            opts,
            zero: ZeroTest::new(opts.breakdown_tol, beta1.max(alpha1)),
            k: 1,
            u_prev: Vector::zeros(n),
            v_prev: Vector::zeros(n),
            basis_u: if keep { vec![u.clone()] } else { Vec::new() },
            basis_v: if keep { vec![v.clone()] } else { Vec::new() },
            u,
            v,
            alphas: vec![alpha1],
            betas: vec![beta1],
            thetas: Vec::new(),
            terminated: None,
        })
    }

    /// Returns `(θ_k, β_{k+1}, α_{k+1})`, with zeros stored exactly.
    pub fn step(&mut self) -> Result<(f64, f64, f64)> {
        if let Some((k, _)) = self.terminated {
            return Err(Error::ProcessTerminated {
                process: "Saunders–Simon–Yip",
                step: k,
            });
        }
        let k = self.k;
        let mut q = self.op.apply(&self.v)?;
        q.axpy(-self.alphas[k - 1], &self.u_prev, 1.0);
        let theta = self.u.dot(&q);
        q.axpy(-theta, &self.u, 1.0);
        let mut p = self.op.apply_transpose(&self.u)?;
        p.axpy(-self.betas[k - 1], &self.v_prev, 1.0);
        p.axpy(-theta, &self.v, 1.0);
        if self.opts.reorthogonalize {
            reorthogonalize(&mut q, &self.basis_u);
            reorthogonalize(&mut p, &self.basis_v);
        }
        self.thetas.push(theta);
        let (bn, an) = (norm(&q), norm(&p));
        let beta_zero = self.zero.is_zero(bn);
        let alpha_zero = self.zero.is_zero(an);
        let beta = if beta_zero { 0.0 } else { bn };
        let alpha = if alpha_zero { 0.0 } else { an };
        self.betas.push(beta);
        self.alphas.push(alpha);
        if beta_zero || alpha_zero {
            let side = if beta_zero {
                SsyTermination::BetaZero
            } else {
                SsyTermination::AlphaZero
            };
            self.terminated = Some((k, side));
            return Ok((theta, beta, alpha));
        }
        let u_next = q / beta;
        let v_next = p / alpha;
        if self.opts.keeps_basis() {
            self.basis_u.push(u_next.clone());
            self.basis_v.push(v_next.clone());
        }
        self.u_prev = std::mem::replace(&mut self.u, u_next);
        self.v_prev = std::mem::replace(&mut self.v, v_next);
        self.k += 1;
        Ok((theta, beta, alpha))
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

    pub fn k(&self) -> usize {
        self.k
    }

    /// `ũ_k`.
    pub fn u(&self) -> &Vector {
        &self.u
    }

    /// `ṽ_k`.
    pub fn v(&self) -> &Vector {
        &self.v
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated.is_some()
    }

    pub fn termination(&self) -> Option<(usize, SsyTermination)> {
        self.terminated
    }

    pub fn basis_u(&self) -> Option<&[Vector]> {
        self.opts.keeps_basis().then_some(self.basis_u.as_slice())
    }

    pub fn basis_v(&self) -> Option<&[Vector]> {
        self.opts.keeps_basis().then_some(self.basis_v.as_slice())
    }

    pub fn u_matrix(&self) -> Option<DMatrix<f64>> {
        self.basis_u().map(|b| columns_to_matrix(self.op.n(), b))
    }

    pub fn v_matrix(&self) -> Option<DMatrix<f64>> {
        self.basis_v().map(|b| columns_to_matrix(self.op.n(), b))
    }

    /// `H̃_{k+1,k}`: `θ` on the diagonal, `β` below, `α` above.
    pub fn h_rect(&self, k: usize) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(k + 1, k);
        for j in 0..k {
            h[(j, j)] = self.thetas[j];
            h[(j + 1, j)] = self.betas[j + 1];
            if j >= 1 {
                h[(j - 1, j)] = self.alphas[j];
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorizations::Lanczos;
    use crate::operators::{conv2d_skew, tridiag_skew};

    #[test]
    fn reduces_to_lanczos_on_two_by_two() {
        let s = tridiag_skew(2, 1.0);
        let b = Vector::from_vec(vec![1.0, 0.0]);
        let mut ssy = Ssy::new(&s, &b, &b, ProcessOptions::default()).unwrap();
        let (t, beta, alpha) = ssy.step().unwrap();
        assert_eq!((t, beta, alpha), (0.0, 1.0, 1.0));
        let (t, beta, alpha) = ssy.step().unwrap();
        assert_eq!((t, beta, alpha), (0.0, 0.0, 0.0));
        assert_eq!(ssy.termination(), Some((2, SsyTermination::BetaZero)));
    }

    #[test]
    fn theta_vanishes_on_skew_with_c_equal_b() {
        let s = conv2d_skew(6, 0.4, 0.6);
        let b = Vector::from_fn(36, |i, _| 1.0 + (i as f64).sin());
        let mut ssy = Ssy::new(&s, &b, &b, ProcessOptions::default()).unwrap();
        let mut lz = Lanczos::new(&s, &b, ProcessOptions::default()).unwrap();
        ssy.run(15).unwrap();
        lz.run(15).unwrap();
        for &t in ssy.thetas() {
            assert!(t.abs() <= 1e-12);
        }
        for (k, g) in lz.gammas().iter().enumerate().take(16) {
            assert!((ssy.alphas()[k] - g).abs() <= 1e-12 * g.max(1.0));
            assert!((ssy.betas()[k] - g).abs() <= 1e-12 * g.max(1.0));
        }
    }

    #[test]
    fn two_sided_recurrences_hold() {
        let mut rng = crate::rng::SplitMix64::new(17);
        let m = DMatrix::from_fn(12, 12, |_, _| rng.symmetric());
        let a = LinearOperator::from_dense(m.clone()).unwrap();
        let b = Vector::from_fn(12, |i, _| (i as f64 + 1.0).recip());
        let c = Vector::from_fn(12, |i, _| (i as f64).cos());
        let mut ssy = Ssy::new(&a, &b, &c, ProcessOptions::stored()).unwrap();
        ssy.run(6).unwrap();
        assert!(!ssy.is_terminated(), "{:?}", ssy.termination());
        let k = 6;
        let u = ssy.u_matrix().unwrap();
        let v = ssy.v_matrix().unwrap();
        let lhs = &m * v.columns(0, k);
        let rhs = u.columns(0, k + 1) * ssy.h_rect(k);
        assert!((lhs - rhs).norm() <= 1e-10);
        let uk = u.columns(0, k);
        assert!((uk.transpose() * uk - DMatrix::identity(k, k)).norm() <= 1e-10);
    }
}
