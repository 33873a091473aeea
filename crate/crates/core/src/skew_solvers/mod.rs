//! Solvers for `Sx = b` with skew-symmetric `S`, plus CRAIG and LSQR on any
//! square operator.

use crate::error::{Error, Result};
use crate::factorizations::{GolubKahan, Lanczos, ProcessOptions};
use crate::history::{ConvergenceHistory, Method, Outcome, Recorder, SolverConfig};
use crate::operators::LinearOperator;
use crate::recurrences::{self, LqMode};
use crate::vector::{norm, Vector};

pub(crate) fn check_inputs(op: &LinearOperator, b: &Vector, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if b.len() != op.n() {
        return Err(Error::DimensionMismatch {
            expected: op.n(),
            found: b.len(),
        });
    }
    if norm(b) == 0.0 {
        return Err(Error::InvalidArgument(
            "right-hand side must be nonzero".into(),
        ));
    }
    Ok(())
}

fn require_skew(op: &LinearOperator) -> Result<()> {
    if !op.is_skew() {
        return Err(Error::StructureMismatch {
            required: "skew",
            found: op.structure().name(),
        });
    }
    Ok(())
}

/// S²CG: the even Galerkin iterates `x^G_{2j}`.
///
/// Odd-`ℓ` termination means `b ∉ ran(S)`; the outcome is then
/// [`Outcome::NotApplicable`] and the solution is the last even iterate.
pub fn s2cg_solve(
    s: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    require_skew(s)?;
    check_inputs(s, b, cfg)?;
    let mut lz = Lanczos::new(s, b, ProcessOptions::from(cfg))?;
    let mut rec = Recorder::new(s, b, cfg);
    let (x, outcome, _) = recurrences::lq(&mut lz, 0.0, LqMode::SkewEven, cfg, &mut rec)?;
    Ok(rec.finish(Method::S2cg, x, outcome))
}

/// S²MR: minimum residual over `𝒦_k(S, b)`; returns `S†b` at termination.
pub fn s2mr_solve(
    s: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    require_skew(s)?;
    check_inputs(s, b, cfg)?;
    let mut lz = Lanczos::new(s, b, ProcessOptions::from(cfg))?;
    let mut rec = Recorder::new(s, b, cfg);
    let (x, outcome) = recurrences::minres(&mut lz, 0.0, cfg, &mut rec)?;
    Ok(rec.finish(Method::S2mr, x, outcome))
}

/// CRAIG on the Golub–Kahan bidiagonalization: `x_j = x_{j−1} + τ_j v_j`.
pub fn craig_solve(
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    check_inputs(a, b, cfg)?;
    let mut gk = GolubKahan::new(a, b, ProcessOptions::from(cfg))?;
    let mut rec = Recorder::new(a, b, cfg);
    let mut x = Vector::zeros(a.n());
    let beta1 = gk.betas()[0];
    let tol = cfg.tol * beta1;
    if gk.is_terminated() {
        let outcome = Outcome::Breakdown {
            iter: 0,
            reason: "α₁ = 0: Aᵀb = 0, system is inconsistent",
        };
        return Ok(rec.finish(Method::Craig, x, outcome));
    }
    let mut tau = beta1 / gk.alphas()[0];
    for j in 1..=cfg.max_iters_for(a.n()) {
        x.axpy(tau, gk.v(), 1.0);
        let (beta, alpha) = gk.step()?;
        let est = beta * tau.abs();
        rec.record(j, &x, est);
        match alpha {
            None => return Ok(rec.finish(Method::Craig, x, Outcome::Exhausted { iter: j })),
            Some(0.0) => {
                let outcome = Outcome::Breakdown {
                    iter: j,
                    reason: "α_{k₀+1} = 0: right-hand side is not in the range",
                };
                return Ok(rec.finish(Method::Craig, x, outcome));
            }
            Some(a) => {
                if est <= tol {
                    return Ok(rec.finish(Method::Craig, x, Outcome::Converged));
                }
                tau = -beta * tau / a;
            }
        }
    }
    Ok(rec.finish(Method::Craig, x, Outcome::MaxIterations))
}

/// LSQR with the Paige–Saunders rotations. Stops on a small residual, a
/// small normal-equations residual `‖Aᵀr‖ ≤ tol·‖A‖‖r‖`, or termination of
/// the bidiagonalization.
pub fn lsqr_solve(
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<ConvergenceHistory> {
    check_inputs(a, b, cfg)?;
    let mut gk = GolubKahan::new(a, b, ProcessOptions::from(cfg))?;
    let mut rec = Recorder::new(a, b, cfg);
    let n = a.n();
    let mut x = Vector::zeros(n);
    let beta1 = gk.betas()[0];
    let tol = cfg.tol * beta1;
    if gk.is_terminated() {
        return Ok(rec.finish(Method::Lsqr, x, Outcome::Exhausted { iter: 0 }));
    }
    let alpha1 = gk.alphas()[0];
    let mut w = gk.v().clone();
    let mut phi_bar = beta1;
    let mut rho_bar = alpha1;
    let mut anorm2 = alpha1 * alpha1;

    for j in 1..=cfg.max_iters_for(n) {
        let (beta, alpha) = gk.step()?;
        let alpha = alpha.unwrap_or(0.0);
        anorm2 += beta * beta + alpha * alpha;
        let rho = rho_bar.hypot(beta);
        let c = rho_bar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rho_bar = -c * alpha;
        let phi = c * phi_bar;
        phi_bar *= s;
        x.axpy(phi / rho, &w, 1.0);
        rec.record(j, &x, phi_bar);

        if gk.is_terminated() {
            return Ok(rec.finish(Method::Lsqr, x, Outcome::Exhausted { iter: j }));
        }
        let normal_residual = phi_bar * alpha * c.abs();
        if phi_bar <= tol || normal_residual <= cfg.tol * anorm2.sqrt() * phi_bar {
            return Ok(rec.finish(Method::Lsqr, x, Outcome::Converged));
        }
        w *= -theta / rho;
        w += gk.v();
    }
    Ok(rec.finish(Method::Lsqr, x, Outcome::MaxIterations))
}
