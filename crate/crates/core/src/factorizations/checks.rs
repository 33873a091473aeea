use nalgebra::DMatrix;

use super::{GolubKahan, Lanczos, ProcessOptions, Ssy, TerminationSide};
use crate::equivalence::{scalar_deviation, DeviationReport};
use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::oracle;
use crate::vector::{norm, Vector};

fn require_skew(s: &LinearOperator) -> Result<()> {
    if s.is_skew() {
        Ok(())
    } else {
        Err(Error::StructureMismatch {
            required: "skew",
            found: s.structure().name(),
        })
    }
}

fn with_basis(mut opts: ProcessOptions) -> ProcessOptions {
    opts.store_basis = true;
    opts
}

fn pow_neg1(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Entry `i` (1-based) of `D = diag(1, 1, −1, −1, 1, 1, …)`.
pub fn d_sign(i: usize) -> f64 {
    assert!(i >= 1);
    pow_neg1(i.div_ceil(2) + 1)
}

/// Entry `i` (1-based) of `D̃ = diag(1, −1, −1, 1, 1, −1, …)`.
pub fn d_tilde_sign(i: usize) -> f64 {
    assert!(i >= 1);
    if i % 2 == 1 {
        pow_neg1(i.div_ceil(2) + 1)
    } else {
        pow_neg1(i / 2)
    }
}

pub fn sign_matrix_d(l: usize) -> DMatrix<f64> {
    DMatrix::from_diagonal(&Vector::from_fn(l, |i, _| d_sign(i + 1)))
}

pub fn sign_matrix_d_tilde(l: usize) -> DMatrix<f64> {
    DMatrix::from_diagonal(&Vector::from_fn(l, |i, _| d_tilde_sign(i + 1)))
}

/// Compares `k` steps of Golub–Kahan on skew `S` with `2k` Lanczos steps:
/// `β_j = γ₂ⱼ₋₁`, `α_j = γ₂ⱼ`, `u_j = (−1)^{j−1}w₂ⱼ₋₁`, `v_j = (−1)ʲw₂ⱼ`.
/// Scalars are compared relatively, unit vectors absolutely.
pub fn check_gk_lanczos_equivalence(
    s: &LinearOperator,
    b: &Vector,
    steps: usize,
    opts: ProcessOptions,
) -> Result<DeviationReport> {
    require_skew(s)?;
    let opts = with_basis(opts);
    let mut lz = Lanczos::new(s, b, opts)?;
    lz.run(2 * steps + 1)?;
    let mut gk = GolubKahan::new(s, b, opts)?;
    gk.run(steps)?;

    let mut report = DeviationReport::new("gk-lanczos");
    let w = lz.basis().expect("basis stored");
    let us = gk.basis_u().expect("basis stored");
    let vs = gk.basis_v().expect("basis stored");
    let g = lz.gammas();
    for j in 1..=steps {
        let mut any = false;
        if let (Some(&bj), Some(&gj)) = (gk.betas().get(j - 1), g.get(2 * j - 2)) {
            let d = scalar_deviation(bj, gj);
            report.component("beta", d);
            report.push(j, d);
            any = true;
        }
        if let (Some(&aj), Some(&gj)) = (gk.alphas().get(j - 1), g.get(2 * j - 1)) {
            let d = scalar_deviation(aj, gj);
            report.component("alpha", d);
            report.push(j, d);
            any = true;
        }
        if let (Some(u), Some(wv)) = (us.get(j - 1), w.get(2 * j - 2)) {
            let d = norm(&(u - wv * pow_neg1(j - 1)));
            report.component("u", d);
            report.push(j, d);
        }
        if let (Some(v), Some(wv)) = (vs.get(j - 1), w.get(2 * j - 1)) {
            let d = norm(&(v - wv * pow_neg1(j)));
            report.component("v", d);
            report.push(j, d);
        }
        if !any {
            break;
        }
    }
    if let (Some((k0, side)), Some(l)) = (gk.termination(), lz.grade()) {
        let expected = match side {
            TerminationSide::BetaZero => 2 * k0,
            TerminationSide::AlphaZero => 2 * k0 + 1,
        };
        report.note(format!(
            "Golub–Kahan stopped at k₀ = {k0} ({side:?}); Lanczos ℓ = {l}"
        ));
        if expected != l {
            report.fail(format!(
                "termination mismatch: expected ℓ = {expected}, got {l}"
            ));
        }
    }
    Ok(report)
}

/// Compares SSY on `(S, b, c = b)` with Lanczos on `(S, b)`:
/// `θ_k = 0`, `α_k = β_k = γ_k`, `ũ_k = D_kk w_k`, `ṽ_k = D̃_kk w_k`, and
/// `H̃_{k+1,k} = D_{k+1} H_{k+1,k} D̃_k`. The per-entry signs come from the
/// period-4 patterns; they are checked against the closed forms
/// `(−1)^⌊(k+3)/2⌋`, `(−1)^⌈(k+3)/2⌉` as hard failures.
pub fn check_ssy_lanczos_equivalence(
    s: &LinearOperator,
    b: &Vector,
    steps: usize,
    opts: ProcessOptions,
) -> Result<DeviationReport> {
    require_skew(s)?;
    let opts = with_basis(opts);
    let mut lz = Lanczos::new(s, b, opts)?;
    lz.run(steps)?;
    let mut ssy = Ssy::new(s, b, b, opts)?;
    ssy.run(steps)?;

    let mut report = DeviationReport::new("ssy-lanczos");
    let w = lz.basis().expect("basis stored");
    let us = ssy.basis_u().expect("basis stored");
    let vs = ssy.basis_v().expect("basis stored");
    let g = lz.gammas();
    let scale = s.frobenius_norm().max(1.0);
    let kmax = steps.min(ssy.thetas().len()).min(g.len().saturating_sub(1));
    #[allow(clippy::needless_range_loop)]
    for k in 1..=kmax {
        let dt = ssy.thetas()[k - 1].abs() / scale;
        report.component("theta", dt);
        report.push(k, dt);
        let da = scalar_deviation(ssy.alphas()[k], g[k]);
        let db = scalar_deviation(ssy.betas()[k], g[k]);
        report.component("alpha", da);
        report.component("beta", db);
        report.push(k, da.max(db));
    }
    for k in 1..=steps.min(w.len()).min(us.len()) {
        let du = norm(&(&us[k - 1] - &w[k - 1] * d_sign(k)));
        let dv = norm(&(&vs[k - 1] - &w[k - 1] * d_tilde_sign(k)));
        report.component("u", du);
        report.component("v", dv);
        report.push(k, du.max(dv));

        let floor_exp = (k + 3) / 2;
        let ceil_exp = (k + 3).div_ceil(2);
        if d_sign(k) != pow_neg1(floor_exp) || d_tilde_sign(k) != pow_neg1(ceil_exp) {
            report.fail(format!(
                "sign pattern disagrees with closed form at k = {k}"
            ));
        }
    }
    if kmax >= 1 {
        let h_tilde = ssy.h_rect(kmax);
        let h = lz.h_rect(kmax);
        let predicted = sign_matrix_d(kmax + 1) * h * sign_matrix_d_tilde(kmax);
        let d = (h_tilde - predicted).amax() / g[..=kmax].iter().cloned().fold(1.0, f64::max);
        report.component("h_tilde", d);
    }
    Ok(report)
}

/// `‖S W_k − W_{k+1} H_{k+1,k}‖_F` over the stored basis (with `H_ℓ` and
/// `W_ℓ` after termination).
pub fn lanczos_recurrence_residual(lz: &Lanczos<'_>) -> Option<f64> {
    let w = lz.basis_matrix()?;
    let s = lz.operator().to_dense();
    let s = if lz.is_negated() { -s } else { s };
    let cols = w.ncols();
    let (k, lhs_rows) = match lz.grade() {
        Some(l) => (l, l),
        None => (cols - 1, cols),
    };
    if k == 0 {
        return Some(0.0);
    }
    let h = super::lanczos::h_matrix(lz.gammas(), lhs_rows, k);
    Some((s * w.columns(0, k) - w.columns(0, lhs_rows) * h).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `ℓ` even; expected exactly when `b ∈ ran(S)`.
    EvenInRange,
    /// `ℓ` odd; expected exactly when `b ∉ ran(S)`.
    OddNotInRange,
}

#[derive(Debug, Clone)]
pub struct ParityReport {
    pub parity: Parity,
    pub ell: usize,
    /// Dense decision `‖b − SS†b‖ / ‖b‖ ≤ 1e-10`.
    pub oracle_consistent: bool,
    pub range_residual: f64,
    /// Classification and oracle decision agree.
    pub agrees: bool,
    /// Every leading `H₂ⱼ`, `2j ≤ ℓ`, has full numerical rank.
    pub even_blocks_nonsingular: bool,
}

/// Runs Lanczos (fully reorthogonalized) to termination and classifies the
/// grade parity, cross-checked against the dense consistency decision.
pub fn termination_parity(s: &LinearOperator, b: &Vector) -> Result<ParityReport> {
    require_skew(s)?;
    let mut lz = Lanczos::new(s, b, ProcessOptions::reorthogonalized())?;
    lz.run(s.n() + 1)?;
    let ell = lz.grade().ok_or_else(|| {
        Error::InvalidArgument("Lanczos did not terminate within n + 1 steps".into())
    })?;
    let parity = if ell % 2 == 0 {
        Parity::EvenInRange
    } else {
        Parity::OddNotInRange
    };
    let dense = s.to_dense();
    let range_residual = oracle::range_residual(&dense, b)?;
    let oracle_consistent = range_residual <= 1e-10;
    let even_blocks_nonsingular = (1..=ell / 2).all(|j| oracle::rank(&lz.h_square(2 * j)) == 2 * j);
    Ok(ParityReport {
        parity,
        ell,
        oracle_consistent,
        range_residual,
        agrees: oracle_consistent == (parity == Parity::EvenInRange),
        even_blocks_nonsingular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{conv2d_skew, example_rhs, random_singular_skew, tridiag_skew, RhsKind};
    use crate::rng::SplitMix64;

    #[test]
    fn sign_patterns() {
        let d: Vec<f64> = (1..=8).map(d_sign).collect();
        assert_eq!(d, [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]);
        let dt: Vec<f64> = (1..=8).map(d_tilde_sign).collect();
        assert_eq!(dt, [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0]);
        assert_eq!(
            sign_matrix_d_tilde(4),
            DMatrix::from_diagonal(&Vector::from_vec(vec![1.0, -1.0, -1.0, 1.0]))
        );
    }

    #[test]
    fn gk_lanczos_two_by_two() {
        let s = tridiag_skew(2, 1.0);
        let b = Vector::from_vec(vec![1.0, 0.0]);
        let r = check_gk_lanczos_equivalence(&s, &b, 1, ProcessOptions::default()).unwrap();
        assert!(r.passes(1e-15), "{}", r.render(1e-15));
    }

    #[test]
    fn gk_lanczos_example_systems() {
        let s = tridiag_skew(49, 1.0);
        for kind in [RhsKind::Consistent, RhsKind::Inconsistent] {
            let b = example_rhs(kind, 49).unwrap();
            let r = check_gk_lanczos_equivalence(&s, &b, 12, ProcessOptions::default()).unwrap();
            assert!(r.passes(1e-10), "{}", r.render(1e-10));
        }
        let s = conv2d_skew(15, 0.4, 0.6);
        let b = SplitMix64::new(7).vector(225);
        let r = check_gk_lanczos_equivalence(&s, &b, 20, ProcessOptions::default()).unwrap();
        assert!(r.passes(1e-8), "{}", r.render(1e-8));
    }

    #[test]
    fn ssy_lanczos_matches() {
        let s = tridiag_skew(2, 1.0);
        let b = Vector::from_vec(vec![1.0, 0.0]);
        let r = check_ssy_lanczos_equivalence(&s, &b, 2, ProcessOptions::default()).unwrap();
        assert_eq!(r.max_deviation(), 0.0, "{}", r.render(0.0));

        let s = tridiag_skew(49, 1.0);
        let b = example_rhs(RhsKind::Consistent, 49).unwrap();
        let r = check_ssy_lanczos_equivalence(&s, &b, 24, ProcessOptions::default()).unwrap();
        assert!(r.passes(1e-10), "{}", r.render(1e-10));
    }

    #[test]
    fn recurrence_residual_small() {
        let s = conv2d_skew(8, 0.4, 0.6);
        let b = SplitMix64::new(3).vector(64);
        let mut lz = Lanczos::new(&s, &b, ProcessOptions::stored()).unwrap();
        lz.run(20).unwrap();
        let r = lanczos_recurrence_residual(&lz).unwrap();
        assert!(r <= 1e-12 * s.frobenius_norm() * 20f64.sqrt(), "{r}");
    }

    #[test]
    fn parity_on_examples() {
        let s = tridiag_skew(49, 1.0);
        let r = termination_parity(&s, &example_rhs(RhsKind::Consistent, 49).unwrap()).unwrap();
        assert_eq!(r.parity, Parity::EvenInRange);
        assert!(r.agrees && r.even_blocks_nonsingular);
        let r = termination_parity(&s, &example_rhs(RhsKind::Inconsistent, 49).unwrap()).unwrap();
        assert_eq!(r.parity, Parity::OddNotInRange);
        assert!(r.agrees);
        let r =
            termination_parity(&tridiag_skew(2, 1.0), &Vector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!((r.parity, r.ell), (Parity::EvenInRange, 2));
    }

    #[test]
    fn parity_on_random_singular() {
        let mut rng = SplitMix64::new(2024);
        for t in 0..10 {
            let s = random_singular_skew(24, 14, &mut rng);
            let dense = s.to_dense();
            let b = if t % 2 == 0 {
                &dense * rng.vector(24)
            } else {
                rng.vector(24)
            };
            let r = termination_parity(&s, &b).unwrap();
            assert!(r.agrees, "trial {t}: {r:?}");
        }
    }
}
