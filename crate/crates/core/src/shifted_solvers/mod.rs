//! Solvers for `Ax = b` with `A = αI + S`, `α ≠ 0`, and the general
//! USYMLQ/USYMQR pair built on the Saunders–Simon–Yip process.
//!
//! For `α < 0` the Lanczos-based solvers run on `(−A)x = −b`; iterates and
//! records are those of the original system.

use crate::error::{Error, Result};
use crate::factorizations::{Lanczos, ProcessOptions, Ssy, SsyTermination};
use crate::history::{ConvergenceHistory, Method, Outcome, Recorder, SolverConfig};
use crate::operators::LinearOperator;
use crate::recurrences::{self, LqMode};
use crate::rng::SplitMix64;
use crate::skew_solvers::check_inputs;
use crate::vector::{norm, Vector};

pub use crate::recurrences::LqDiagnostics;

fn shifted_parts(op: &LinearOperator) -> Result<(f64, &LinearOperator)> {
    match (op.shift(), op.skew_part()) {
        (Some(alpha), Some(s)) => Ok((alpha, s)),
        _ => Err(Error::StructureMismatch {
            required: "shifted-skew",
            found: op.structure().name(),
        }),
    }
}

/// Lanczos on `S` (or `−S` with `−b` when `α < 0`) and the positive shift.
fn oriented_lanczos<'a>(
    s: &'a LinearOperator,
    b: &Vector,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<(Lanczos<'a>, f64)> {
    let opts = ProcessOptions::from(cfg);
    if alpha > 0.0 {
        Ok((Lanczos::new(s, b, opts)?, alpha))
    } else {
        Ok((Lanczos::negated(s, &(-b), opts)?, -alpha))
    }
}

/// Conjugate-gradient iteration for shifted skew systems, as a step machine.
///
/// Differs from CG only in the sign of `β_k`; with `α > 0`
/// the denominators `pᵀAp = α‖p‖²` stay positive.
#[derive(Debug, Clone)]
pub struct S3cg<'a> {
    op: &'a LinearOperator,
    sign: f64,
    k: usize,
    x: Vector,
    r: Vector,
    p: Vector,
    ap: Vector,
    rr: f64,
}

impl<'a> S3cg<'a> {
    pub fn new(op: &'a LinearOperator, b: &Vector) -> Result<Self> {
        let (alpha, _) = shifted_parts(op)?;
        if b.len() != op.n() {
            return Err(Error::DimensionMismatch {
                expected: op.n(),
                found: b.len(),
            });
        }
        let sign = alpha.signum();
        let r = b * sign;
        Ok(Self {
            op,
            sign,
            k: 0,
            x: Vector::zeros(op.n()),
            rr: r.dot(&r),
            p: r.clone(),
            ap: Vector::zeros(op.n()),
            r,
        })
    }

    /// Performs step `k` and returns `‖r_k‖₂`.
    pub fn step(&mut self) -> Result<f64> {
        let k = self.k + 1;
        self.op
            .apply_into(self.p.as_slice(), self.ap.as_mut_slice());
        self.ap *= self.sign;
        let pap = self.p.dot(&self.ap);
        if !(pap > 0.0) {
            return Err(Error::NumericalBreakdown {
                method: "s3cg",
                iter: k,
                reason: "pᵀAp is not positive",
            });
        }
        let a = self.rr / pap;
        self.x.axpy(a, &self.p, 1.0);
        self.r.axpy(-a, &self.ap, 1.0);
        let rr_new = self.r.dot(&self.r);
        let beta = -rr_new / self.rr;
        self.rr = rr_new;
        self.p *= beta;
        self.p += &self.r;
        self.k = k;
        Ok(rr_new.sqrt())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn x(&self) -> &Vector {
        &self.x
    }

    /// `r_k` of the original system.
    pub fn residual(&self) -> Vector {
        &self.r * self.sign
    }

    /// `p_k`, the direction for the next step.
    pub fn direction(&self) -> &Vector {
        &self.p
    }
}

pub fn s3cg_solve(
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    shifted_parts(a)?;
    check_inputs(a, b, cfg)?;
    let tol = cfg.tol * norm(b);
    let mut cg = S3cg::new(a, b)?;
    let mut rec = Recorder::new(a, b, cfg);
    for _ in 0..cfg.max_iters_for(a.n()) {
        let rn = cg.step()?;
        rec.record(cg.k(), cg.x(), rn);
        if rn <= tol {
            return Ok(rec.finish(Method::S3cg, cg.x, Outcome::Converged));
        }
    }
    Ok(rec.finish(Method::S3cg, cg.x, Outcome::MaxIterations))
}

/// Minimum residual over `𝒦_k(A, b)` via Givens QR of `T_{k+1,k}`.
pub fn s3mr_solve(
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    let (alpha, s) = shifted_parts(a)?;
    check_inputs(a, b, cfg)?;
    let (mut lz, alpha) = oriented_lanczos(s, b, alpha, cfg)?;
    let mut rec = Recorder::new(a, b, cfg);
    let (x, outcome) = recurrences::minres(&mut lz, alpha, cfg, &mut rec)?;
    Ok(rec.finish(Method::S3mr, x, outcome))
}

/// Minimum-length LQ iterates `x^L_k`; with `emit_cg_points` the Galerkin
/// points `x^G_k` are recorded in [`ConvergenceHistory::galerkin`].
pub fn s3lq_solve(
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
    emit_cg_points: bool,
) -> Result<ConvergenceHistory> {
    s3lq_solve_with_diagnostics(a, b, cfg, emit_cg_points).map(|(h, _)| h)
}

pub fn s3lq_solve_with_diagnostics(
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
    emit_cg_points: bool,
) -> Result<(ConvergenceHistory, LqDiagnostics)> {
    let (alpha, s) = shifted_parts(a)?;
    check_inputs(a, b, cfg)?;
    let (mut lz, alpha) = oriented_lanczos(s, b, alpha, cfg)?;
    let mut rec = Recorder::new(a, b, cfg);
    let mode = LqMode::Shifted {
        emit_cg: emit_cg_points,
    };
    let (x, outcome, diag) = recurrences::lq(&mut lz, alpha, mode, cfg, &mut rec)?;
    Ok((rec.finish(Method::S3lq, x, outcome), diag))
}

fn check_c(a: &LinearOperator, c: &Vector) -> Result<()> {
    if c.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: c.len(),
        });
    }
    if norm(c) == 0.0 {
        return Err(Error::InvalidArgument("c must be nonzero".into()));
    }
    Ok(())
}

/// USYMQR: `x_k = Ṽ_k z̃_k` minimizing `‖β₁e₁ − T̃_{k+1,k} z̃‖₂`.
pub fn usymqr_solve(
    a: &LinearOperator,
    b: &Vector,
    c: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    check_inputs(a, b, cfg)?;
    check_c(a, c)?;
    let n = a.n();
    let mut ssy = Ssy::new(a, b, c, ProcessOptions::from(cfg))?;
    let mut rec = Recorder::new(a, b, cfg);
    let beta1 = ssy.betas()[0];
    let tol = cfg.tol * beta1;

    let mut x = Vector::zeros(n);
    let (mut c_prev, mut c_prev2) = (1.0, 1.0);
    let (mut s_prev, mut s_prev2) = (0.0, 0.0);
    let mut zbar = beta1;
    let mut d_prev = Vector::zeros(n);
    let mut d_prev2 = Vector::zeros(n);

    for k in 1..=cfg.max_iters_for(n) {
        let v = ssy.v().clone();
        let alpha_k = if k == 1 { 0.0 } else { ssy.alphas()[k - 1] };
        let (theta, beta_next, _) = ssy.step()?;
        // Column k of T̃: α_k above, θ_k on, β_{k+1} below the diagonal.
        let r_km2 = s_prev2 * alpha_k;
        let eps = c_prev2 * alpha_k;
        let r_km1 = c_prev * eps + s_prev * theta;
        let dbar = -s_prev * eps + c_prev * theta;
        let delta = dbar.hypot(beta_next);
        if delta == 0.0 {
            let outcome = Outcome::Breakdown {
                iter: k,
                reason: "singular projected tridiagonal",
            };
            return Ok(rec.finish(Method::Usymqr, x, outcome));
        }
        let cs = dbar / delta;
        let sn = beta_next / delta;
        let z = cs * zbar;
        zbar *= -sn;
        let mut d = v;
        d.axpy(-r_km1, &d_prev, 1.0);
        d.axpy(-r_km2, &d_prev2, 1.0);
        d /= delta;
        x.axpy(z, &d, 1.0);
        rec.record(k, &x, zbar.abs());

        d_prev2 = std::mem::replace(&mut d_prev, d);
        c_prev2 = c_prev;
        c_prev = cs;
        s_prev2 = s_prev;
        s_prev = sn;

        match ssy.termination() {
            Some((_, SsyTermination::BetaZero)) => {
                return Ok(rec.finish(Method::Usymqr, x, Outcome::Exhausted { iter: k }))
            }
            Some((_, SsyTermination::AlphaZero)) if zbar.abs() > tol => {
                let outcome = Outcome::Breakdown {
                    iter: k,
                    reason: "α_{k+1} = 0 before convergence",
                };
                return Ok(rec.finish(Method::Usymqr, x, outcome));
            }
            _ => {}
        }
        if zbar.abs() <= tol {
            return Ok(rec.finish(Method::Usymqr, x, Outcome::Converged));
        }
    }
    Ok(rec.finish(Method::Usymqr, x, Outcome::MaxIterations))
}

/// USYMLQ: minimum-length `y` with `T̃_{k−1,k} y = β₁e₁`, via LQ. Indexing
/// matches [`s3lq_solve`]: loop step `k` records `x_k` and forms `x_{k+1}`.
pub fn usymlq_solve(
    a: &LinearOperator,
    b: &Vector,
    c: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    check_inputs(a, b, cfg)?;
    check_c(a, c)?;
    let n = a.n();
    let mut ssy = Ssy::new(a, b, c, ProcessOptions::from(cfg))?;
    let mut rec = Recorder::new(a, b, cfg);
    let beta1 = ssy.betas()[0];
    let tol = cfg.tol * beta1;

    let mut x = Vector::zeros(n);
    let mut pt = ssy.v().clone();
    let (mut c_prev, mut c_prev2) = (1.0, 1.0);
    let (mut s_prev, mut s_prev2) = (0.0, 0.0);
    let (mut xi_prev, mut xi_prev2) = (0.0, 0.0);

    for k in 1..=cfg.max_iters_for(n) {
        let beta_k = if k == 1 { 0.0 } else { ssy.betas()[k - 1] };
        let (theta, beta_next, alpha_next) = ssy.step()?;
        // Row k of T̃ after the previous right rotations: (η_k, λ_k, δ̄_k).
        let eta = beta_k * s_prev2;
        let bbar = beta_k * c_prev2;
        let lambda = bbar * c_prev + theta * s_prev;
        let dbar = -bbar * s_prev + theta * c_prev;
        let rhs = if k == 1 { beta1 } else { 0.0 } - lambda * xi_prev - eta * xi_prev2;

        let est = if k == 1 {
            beta1
        } else {
            (eta * xi_prev2 + lambda * xi_prev).hypot(beta_next * s_prev * xi_prev)
        };
        rec.record(k, &x, est);

        let termination = ssy.termination();
        if let Some((_, SsyTermination::BetaZero)) = termination {
            if dbar == 0.0 {
                let outcome = Outcome::Breakdown {
                    iter: k,
                    reason: "singular projected tridiagonal",
                };
                return Ok(rec.finish(Method::Usymlq, x, outcome));
            }
            x.axpy(rhs / dbar, &pt, 1.0);
            rec.record(k + 1, &x, 0.0);
            return Ok(rec.finish(Method::Usymlq, x, Outcome::Exhausted { iter: k + 1 }));
        }
        if est <= tol {
            return Ok(rec.finish(Method::Usymlq, x, Outcome::Converged));
        }

        let delta = dbar.hypot(alpha_next);
        if delta == 0.0 {
            let outcome = Outcome::Breakdown {
                iter: k,
                reason: "zero LQ diagonal",
            };
            return Ok(rec.finish(Method::Usymlq, x, outcome));
        }
        let cs = dbar / delta;
        let sn = alpha_next / delta;
        let xi = rhs / delta;
        let mut p = pt.clone() * cs;
        if termination.is_none() {
            p.axpy(sn, ssy.v(), 1.0);
            pt *= -sn;
            pt.axpy(cs, ssy.v(), 1.0);
        }
        x.axpy(xi, &p, 1.0);

        c_prev2 = c_prev;
        c_prev = cs;
        s_prev2 = s_prev;
        s_prev = sn;
        xi_prev2 = xi_prev;
        xi_prev = xi;

        if termination.is_some() {
            let r = norm(&(b - a.apply(&x)?));
            rec.record(k + 1, &x, r);
            let outcome = if r <= tol {
                Outcome::Converged
            } else {
                Outcome::Breakdown {
                    iter: k + 1,
                    reason: "α_{k+1} = 0 before convergence",
                }
            };
            return Ok(rec.finish(Method::Usymlq, x, outcome));
        }
    }
    Ok(rec.finish(Method::Usymlq, x, Outcome::MaxIterations))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Error of the even Galerkin iterates.
    Cg,
    /// Residual of the minimum-residual iterates.
    Mr,
}

/// Convergence bound for spectrum `α ± i[−β, β]` after `k` steps.
pub fn error_bound(alpha: f64, beta: f64, k: u32, which: BoundKind) -> f64 {
    let q = (1.0 + (beta / alpha).powi(2)).sqrt();
    let ratio = match which {
        BoundKind::Cg => (q - 1.0) / (q + 1.0),
        BoundKind::Mr => (beta / alpha.abs()) / (q + 1.0),
    };
    2.0 * ratio.powi(k as i32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    /// Estimate of `‖S‖₂`.
    pub beta: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub const SPECTRAL_TOL: f64 = 1e-6;
const SPECTRAL_MAX_ITERS: usize = 20_000;

/// `‖S‖₂` by power iteration on `SᵀS`, stopping when the eigen-residual
/// `‖SᵀSv − λv‖` is at most `1e-6·λ`.
pub fn estimate_spectral_interval(s: &LinearOperator) -> Result<SpectralEstimate> {
    if !s.is_skew() {
        return Err(Error::StructureMismatch {
            required: "skew",
            found: s.structure().name(),
        });
    }
    let n = s.n();
    let mut v = SplitMix64::new(0x5eed).vector(n);
    v /= norm(&v);
    let mut sv = Vector::zeros(n);
    let mut w = Vector::zeros(n);
    let mut lambda = 0.0;
    for it in 1..=SPECTRAL_MAX_ITERS {
        s.apply_into(v.as_slice(), sv.as_mut_slice());
        s.apply_transpose_into(sv.as_slice(), w.as_mut_slice());
        lambda = sv.dot(&sv);
        if lambda == 0.0 {
            return Ok(SpectralEstimate {
                beta: 0.0,
                converged: true,
                iterations: it,
            });
        }
        let res = norm(&(&w - &v * lambda));
        let wn = norm(&w);
        v = &w / wn;
        if res <= SPECTRAL_TOL * lambda {
            return Ok(SpectralEstimate {
                beta: lambda.sqrt(),
                converged: true,
                iterations: it,
            });
        }
    }
    Ok(SpectralEstimate {
        beta: lambda.sqrt(),
        converged: false,
        iterations: SPECTRAL_MAX_ITERS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{conv2d_skew, random_rhs, tridiag_skew};
    use crate::oracle;

    fn shifted2() -> LinearOperator {
        LinearOperator::shifted(1.0, tridiag_skew(2, 1.0)).unwrap()
    }

    fn e1() -> Vector {
        Vector::from_vec(vec![1.0, 0.0])
    }

    fn half() -> Vector {
        Vector::from_vec(vec![0.5, 0.5])
    }

    #[test]
    fn scaled_identity_solves_in_one_step() {
        let a = LinearOperator::shifted(0.8, tridiag_skew(2, 0.0)).unwrap();
        let b = Vector::from_vec(vec![1.0, 1.0]);
        let cfg = SolverConfig::default().with_iterates();
        let h = s3cg_solve(&a, &b, &cfg).unwrap();
        assert_eq!(h.iterations(), 1);
        assert!((&h.solution - Vector::from_vec(vec![1.25, 1.25])).norm() < 1e-15);
        let h = s3mr_solve(&a, &b, &cfg).unwrap();
        assert_eq!(h.records[0].estimate_norm, 0.0);
        assert!((&h.solution - &b / 0.8).norm() < 1e-15);
    }

    #[test]
    fn shifted_two_by_two_all_methods() {
        let a = shifted2();
        let cfg = SolverConfig::default().with_iterates();
        let h = s3cg_solve(&a, &e1(), &cfg).unwrap();
        assert!((&h.solution - half()).norm() < 1e-15);
        let h = s3mr_solve(&a, &e1(), &cfg).unwrap();
        assert!((h.records[0].estimate_norm - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((h.iterate(2).unwrap() - half()).norm() < 1e-15);
        let h = s3lq_solve(&a, &e1(), &cfg, true).unwrap();
        assert!((h.iterate(2).unwrap() - half()).norm() < 1e-15);
        let h = usymqr_solve(&a, &e1(), &e1(), &cfg).unwrap();
        assert!((h.iterate(2).unwrap() - half()).norm() < 1e-15);
        let h = usymlq_solve(&a, &e1(), &e1(), &cfg).unwrap();
        assert!((h.iterate(2).unwrap() - half()).norm() < 1e-15);
    }

    #[test]
    fn negative_shift_matches_dense_solve() {
        let s = conv2d_skew(4, 0.4, 0.6);
        let a = LinearOperator::shifted(-0.8, s).unwrap();
        let b = random_rhs(16, 3);
        let x = oracle::dense_solve(&a.to_dense(), &b).unwrap();
        let cfg = SolverConfig::default();
        for h in [
            s3cg_solve(&a, &b, &cfg).unwrap(),
            s3mr_solve(&a, &b, &cfg).unwrap(),
            s3lq_solve(&a, &b, &cfg, false).unwrap(),
            usymqr_solve(&a, &b, &b, &cfg).unwrap(),
            usymlq_solve(&a, &b, &b, &cfg).unwrap(),
        ] {
            assert!(h.outcome.is_success(), "{}: {:?}", h.method, h.outcome);
            assert!((&h.solution - &x).norm() <= 1e-8 * x.norm(), "{}", h.method);
        }
    }

    #[test]
    fn lq_invariants_hold() {
        let a = LinearOperator::shifted(0.8, conv2d_skew(6, 0.4, 0.6)).unwrap();
        let b = random_rhs(36, 11);
        let cfg = SolverConfig::default().with_iterates();
        let (h, d) = s3lq_solve_with_diagnostics(&a, &b, &cfg, true).unwrap();
        assert!(d.max_lambda_ratio <= 1e-12, "{d:?}");
        assert!(d.max_rotation_defect <= 1e-15);
        assert!(d.min_delta_margin >= 0.0);
        assert!((h.iterate(2).unwrap() - h.iterate(3).unwrap()).norm() == 0.0);
        let norms: Vec<f64> = h
            .records
            .iter()
            .map(|r| r.iterate.as_ref().unwrap().norm())
            .collect();
        assert!(norms.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)));
    }

    #[test]
    fn rejects_unshifted_operator() {
        let s = tridiag_skew(2, 1.0);
        assert!(matches!(
            s3mr_solve(&s, &e1(), &SolverConfig::default()),
            Err(Error::StructureMismatch { .. })
        ));
    }

    #[test]
    fn bounds_examples() {
        assert_eq!(error_bound(0.8, 0.0, 1, BoundKind::Cg), 0.0);
        let r = error_bound(1.0, 1.0, 1, BoundKind::Cg);
        assert!((r - 2.0 * (2f64.sqrt() - 1.0) / (2f64.sqrt() + 1.0)).abs() < 1e-15);
        assert!((r - 0.3431).abs() < 1e-4);
        let beta = 2.0 * (0.4 + 0.6) * (std::f64::consts::PI / 16.0).cos();
        let q = (1.0 + (beta / 0.8f64).powi(2)).sqrt();
        assert!(((q - 1.0) / (q + 1.0) - 0.4517).abs() < 1e-4);
    }

    #[test]
    fn spectral_estimates() {
        let e = estimate_spectral_interval(&tridiag_skew(2, 1.0)).unwrap();
        assert!(e.converged && (e.beta - 1.0).abs() < 1e-12);
        let e = estimate_spectral_interval(&tridiag_skew(3, 0.0)).unwrap();
        assert_eq!(e.beta, 0.0);
        let m = 20;
        let e = estimate_spectral_interval(&tridiag_skew(m, 0.7)).unwrap();
        let want = 1.4 * (std::f64::consts::PI / (m as f64 + 1.0)).cos();
        assert!(e.converged);
        assert!((e.beta - want).abs() <= 1e-6 * want, "{} vs {want}", e.beta);
    }
}
