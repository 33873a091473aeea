//! Givens-rotation recurrences on the Lanczos tridiagonal `T = αI + H`,
//! shared by the skew (`α = 0`) and shifted (`α ≠ 0`) solvers.
//!
//! The QR engine follows the minimum-residual scheme (`s_k = +γ_{k+1}/δ_k`);
//! the LQ engine follows the minimum-length scheme (`s_k = −γ_{k+1}/δ_k`).
//! The two sign conventions are deliberately kept separate.

use crate::error::Result;
use crate::factorizations::Lanczos;
use crate::history::{Outcome, Recorder, SolverConfig};
use crate::vector::Vector;

/// Minimum-residual iteration over `𝒦_k`.
///
/// With `α = 0` the odd-indexed `c_k` vanish, so odd steps leave `x`
/// unchanged; an odd termination (`δ_ℓ = 0`) keeps `x_ℓ = x_{ℓ−1}`.
pub(crate) fn minres(
    lz: &mut Lanczos<'_>,
    alpha: f64,
    cfg: &SolverConfig,
    rec: &mut Recorder<'_>,
) -> Result<(Vector, Outcome)> {
    let n = lz.n();
    let gamma1 = lz.gamma(1);
    let tol = cfg.tol * gamma1;
    let maxit = cfg.max_iters_for(n);

    let mut x = Vector::zeros(n);
    let mut delta_t = alpha;
    let mut c_prev = 1.0;
    let (mut s_prev, mut s_prev2) = (0.0, 0.0);
    let mut psi_t = gamma1;
    let mut p_prev = Vector::zeros(n);
    let mut p_prev2 = Vector::zeros(n);

    for k in 1..=maxit {
        let wk = lz.current().clone();
        let gk = lz.gamma(k);
        let g = lz.step()?;
        let delta = delta_t.hypot(g);
        if delta == 0.0 {
            rec.record(k, &x, psi_t.abs());
            return Ok((x, Outcome::Exhausted { iter: k }));
        }
        let c = delta_t / delta;
        let s = g / delta;
        let delta_t_next = alpha * c + g * c_prev * s;
        let psi = c * psi_t;
        psi_t *= -s;

        let mut p = wk;
        p.axpy(gk * s_prev2, &p_prev2, 1.0);
        p /= delta;
        x.axpy(psi, &p, 1.0);
        rec.record(k, &x, psi_t.abs());

        p_prev2 = std::mem::replace(&mut p_prev, p);
        s_prev2 = s_prev;
        s_prev = s;
        c_prev = c;
        delta_t = delta_t_next;

        if g == 0.0 {
            return Ok((x, Outcome::Exhausted { iter: k }));
        }
        if psi_t.abs() <= tol {
            return Ok((x, Outcome::Converged));
        }
    }
    Ok((x, Outcome::MaxIterations))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LqMode {
    /// Every `x^L_k`, optionally with the Galerkin points `x^G_k`.
    Shifted { emit_cg: bool },
    /// `α = 0`: only the even points `x^L_{2j} = x^G_{2j}`.
    SkewEven,
}

/// Diagnostics gathered while running the LQ recurrence.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LqDiagnostics {
    /// `max |λ_k| / (|α| + γ_k)` with `λ_k = γ_k c_{k−2} c_{k−1} + α s_{k−1}`.
    pub max_lambda_ratio: f64,
    /// `max |c_k² + s_k² − 1|`.
    pub max_rotation_defect: f64,
    /// `min (δ_k − γ_{k+1})` before termination; nonnegative in theory.
    pub min_delta_margin: f64,
}

/// Minimum-length (LQ) iteration. At loop step `k` the record for `x^L_k`
/// is emitted (its residual needs `γ_{k+1}`), then `x^L_{k+1}` is formed.
pub(crate) fn lq(
    lz: &mut Lanczos<'_>,
    alpha: f64,
    mode: LqMode,
    cfg: &SolverConfig,
    rec: &mut Recorder<'_>,
) -> Result<(Vector, Outcome, LqDiagnostics)> {
    let n = lz.n();
    let gamma1 = lz.gamma(1);
    let tol = cfg.tol * gamma1;
    let maxit = cfg.max_iters_for(n);
    let emit_cg = matches!(mode, LqMode::Shifted { emit_cg: true });
    let skew = mode == LqMode::SkewEven;

    let mut diag = LqDiagnostics {
        min_delta_margin: f64::INFINITY,
        ..Default::default()
    };
    let mut x = Vector::zeros(n);
    let mut pt = lz.current().clone();
    let mut delta_t = alpha;
    let (mut c_prev, mut c_prev2) = (1.0, 1.0);
    let (mut s_prev, mut s_prev2) = (0.0, 0.0);
    let (mut xi_prev, mut xi_prev2) = (0.0, 0.0);

    for k in 1..=maxit {
        let gk = lz.gamma(k);
        let g = lz.step()?;
        let eta_k = gk * s_prev2;
        let eta_k1 = g * s_prev;

        let est = if k == 1 {
            gamma1
        } else {
            (eta_k * xi_prev2).hypot(eta_k1 * xi_prev)
        };
        if !skew || k % 2 == 0 {
            rec.record(k, &x, est);
        }
        if k >= 2 {
            let lambda = gk * c_prev2 * c_prev + alpha * s_prev;
            diag.max_lambda_ratio = diag.max_lambda_ratio.max(lambda.abs() / (alpha.abs() + gk));
        }

        if emit_cg {
            if delta_t == 0.0 {
                rec.skip_galerkin(k);
            } else {
                let xi_t = if k == 1 {
                    gamma1 / delta_t
                } else {
                    -eta_k * xi_prev2 / delta_t
                };
                let mut xg = x.clone();
                xg.axpy(xi_t, &pt, 1.0);
                let est_g = g * (s_prev * xi_prev + c_prev * xi_t).abs();
                rec.record_galerkin(k, &xg, est_g);
            }
        }

        if skew && g == 0.0 {
            let outcome = if k % 2 == 0 {
                Outcome::Exhausted { iter: k }
            } else {
                Outcome::NotApplicable {
                    iter: k,
                    reason: "Lanczos terminated at odd ℓ: right-hand side is not in the range",
                }
            };
            return Ok((x, outcome, diag));
        }
        if g != 0.0 && est <= tol && (!skew || k % 2 == 0) {
            return Ok((x, Outcome::Converged, diag));
        }

        let delta = delta_t.hypot(g);
        if delta == 0.0 {
            return Ok((
                x,
                Outcome::Breakdown {
                    iter: k,
                    reason: "zero LQ diagonal",
                },
                diag,
            ));
        }
        if g != 0.0 {
            diag.min_delta_margin = diag.min_delta_margin.min(delta - g);
        }
        let c = delta_t / delta;
        let s = -g / delta;
        diag.max_rotation_defect = diag.max_rotation_defect.max((c * c + s * s - 1.0).abs());
        let delta_t_next = alpha * c - g * c_prev * s;
        let xi = match k {
            1 => gamma1 / delta,
            2 => 0.0,
            _ => -eta_k * xi_prev2 / delta,
        };
        let w_next = lz.current();
        let mut p = pt.clone() * c;
        p.axpy(s, w_next, 1.0);
        x.axpy(xi, &p, 1.0);
        pt *= -s;
        pt.axpy(c, w_next, 1.0);

        s_prev2 = s_prev;
        s_prev = s;
        c_prev2 = c_prev;
        c_prev = c;
        xi_prev2 = xi_prev;
        xi_prev = xi;
        delta_t = delta_t_next;

        if g == 0.0 {
            rec.record(k + 1, &x, 0.0);
            return Ok((x, Outcome::Exhausted { iter: k + 1 }, diag));
        }
    }
    Ok((x, Outcome::MaxIterations, diag))
}
