//! Dense brute-force references for desk-scale validation.
//!
//! Everything here works on materialized matrices with `n ≤ 400`, builds
//! Krylov bases explicitly with twice-iterated Gram–Schmidt and solves the
//! small projected problems with SVD or QR. Rank decisions use the single
//! relative threshold [`RANK_TOL`]`·σ_max`.

use nalgebra::DMatrix;

use crate::equivalence::DeviationReport;
use crate::error::{Error, Result};
use crate::factorizations::{GolubKahan, Lanczos, ProcessOptions, TerminationSide};
use crate::operators::LinearOperator;
use crate::rng::SplitMix64;
use crate::vector::{norm, Vector};

pub const MAX_ORACLE_N: usize = 400;

/// Singular values at or below `RANK_TOL·σ_max` count as zero.
pub const RANK_TOL: f64 = 1e-10;

fn check_size(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() > MAX_ORACLE_N {
        return Err(Error::OracleTooLarge {
            n: a.nrows(),
            limit: MAX_ORACLE_N,
        });
    }
    Ok(())
}

fn check_rhs(a: &DMatrix<f64>, b: &Vector) -> Result<()> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Thin SVD `A = U diag(σ) Vᵀ` (σ descending), computed with faer.
struct Svd {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

fn svd(a: &DMatrix<f64>) -> Svd {
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let d = m.thin_svd().expect("SVD did not converge");
    let (u, s, v) = (d.U(), d.S(), d.V());
    let k = a.nrows().min(a.ncols());
    Svd {
        u: DMatrix::from_fn(a.nrows(), k, |i, j| u[(i, j)]),
        sigma: (0..k).map(|i| s[i]).collect(),
        v: DMatrix::from_fn(a.ncols(), k, |i, j| v[(i, j)]),
    }
}

fn cutoff(sigma: &[f64]) -> f64 {
    RANK_TOL * sigma.iter().cloned().fold(0.0, f64::max)
}

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    m.singular_values().expect("SVD did not converge")
}

/// Minimum-norm least-squares solution of an arbitrary (possibly
/// rectangular) system, by SVD with the relative cutoff.
fn min_norm_lstsq(m: &DMatrix<f64>, rhs: &Vector) -> Vector {
    if m.ncols() == 0 {
        return Vector::zeros(0);
    }
    if m.nrows() == 0 {
        return Vector::zeros(m.ncols());
    }
    let d = svd(m);
    let cut = cutoff(&d.sigma);
    let mut y = Vector::zeros(m.ncols());
    for (i, &s) in d.sigma.iter().enumerate() {
        if s > cut && s > 0.0 {
            let coef = d.u.column(i).dot(rhs) / s;
            y.axpy(coef, &d.v.column(i), 1.0);
        }
    }
    y
}

/// `A†` by SVD.
pub fn pseudo_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_size(a)?;
    let n = a.nrows();
    let d = svd(a);
    let cut = cutoff(&d.sigma);
    let mut p = DMatrix::zeros(n, n);
    for (i, &s) in d.sigma.iter().enumerate() {
        if s > cut && s > 0.0 {
            p += d.v.column(i) * d.u.column(i).transpose() / s;
        }
    }
    Ok(p)
}

/// `A†b`, the minimum-norm least-squares solution.
pub fn dense_pseudoinverse_solution(a: &DMatrix<f64>, b: &Vector) -> Result<Vector> {
    check_size(a)?;
    check_rhs(a, b)?;
    Ok(min_norm_lstsq(a, b))
}

/// Orthonormal basis of `null(A)` (columns).
pub fn null_space_basis(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_size(a)?;
    let n = a.nrows();
    let m = faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    let d = m.svd().expect("SVD did not converge");
    let (s, v) = (d.S(), d.V());
    let sigma: Vec<f64> = (0..n).map(|i| s[i]).collect();
    let cut = cutoff(&sigma);
    let cols: Vec<Vector> = (0..n)
        .filter(|&i| sigma[i] <= cut)
        .map(|i| Vector::from_fn(n, |r, _| v[(r, i)]))
        .collect();
    Ok(if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    })
}

/// Numerical rank with the shared cutoff.
pub fn rank(a: &DMatrix<f64>) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = singular_values(a);
    let cut = cutoff(&sv);
    sv.iter().filter(|&&s| s > cut && s > 0.0).count()
}

/// `‖b − AA†b‖₂ / ‖b‖₂`: distance of `b` from `ran(A)`.
pub fn range_residual(a: &DMatrix<f64>, b: &Vector) -> Result<f64> {
    let x = dense_pseudoinverse_solution(a, b)?;
    let nb = norm(b);
    Ok(if nb == 0.0 {
        0.0
    } else {
        norm(&(b - a * x)) / nb
    })
}

/// `b ∈ ran(A)` decided by [`range_residual`] `≤ 1e-10`.
pub fn is_consistent(a: &DMatrix<f64>, b: &Vector) -> Result<bool> {
    Ok(range_residual(a, b)? <= 1e-10)
}

/// `A⁻¹b` by LU with partial pivoting.
pub fn dense_solve(a: &DMatrix<f64>, b: &Vector) -> Result<Vector> {
    check_size(a)?;
    check_rhs(a, b)?;
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::InvalidArgument("matrix is singular".into()))
}

/// Residuals of the four Moore–Penrose identities, each relative to `‖A‖_F`
/// or `‖P‖_F`: `APA − A`, `PAP − P`, `(AP)ᵀ − AP`, `(PA)ᵀ − PA`.
pub fn moore_penrose_residuals(a: &DMatrix<f64>, p: &DMatrix<f64>) -> [f64; 4] {
    let na = a.norm().max(f64::MIN_POSITIVE);
    let np = p.norm().max(f64::MIN_POSITIVE);
    let ap = a * p;
    let pa = p * a;
    [
        (&ap * a - a).norm() / na,
        (&pa * p - p).norm() / np,
        (ap.transpose() - &ap).norm() / na.max(1.0),
        (pa.transpose() - &pa).norm() / na.max(1.0),
    ]
}

/// Largest eigenvalue modulus of a skew matrix (`= σ_max`).
pub fn dense_skew_spectral_radius(s: &DMatrix<f64>) -> Result<f64> {
    check_size(s)?;
    if s.is_empty() {
        return Ok(0.0);
    }
    Ok(singular_values(s)[0])
}

/// Explicit orthonormal Krylov basis with its Hessenberg projection.
#[derive(Debug, Clone)]
pub struct KrylovBasis {
    /// `n × m` (or `n × (m+1)` when not exhausted) orthonormal columns.
    pub w: DMatrix<f64>,
    /// `(m+1) × m` Hessenberg, or `m × m` when the space was exhausted.
    pub h: DMatrix<f64>,
    /// Number of basis vectors spanning `𝒦_m`.
    pub m: usize,
    /// The space `𝒦(A, b)` became invariant at `m`.
    pub exhausted: bool,
}

/// Arnoldi with twice-iterated Gram–Schmidt, for `k` steps or until the
/// space is invariant.
pub fn krylov_basis(a: &DMatrix<f64>, b: &Vector, k: usize) -> Result<KrylovBasis> {
    check_size(a)?;
    check_rhs(a, b)?;
    let n = a.nrows();
    let nb = norm(b);
    let mut cols: Vec<Vector> = Vec::new();
    let mut h = DMatrix::zeros(k + 1, k);
    if nb == 0.0 || k == 0 {
        if nb > 0.0 {
            cols.push(b / nb);
        }
        return Ok(KrylovBasis {
            w: columns_or_empty(n, &cols),
            h: DMatrix::zeros(cols.len().min(1), 0),
            m: 0,
            exhausted: nb == 0.0,
        });
    }
    cols.push(b / nb);
    let anorm = a.norm().max(f64::MIN_POSITIVE);
    for j in 0..k {
        let mut v = a * &cols[j];
        for _ in 0..2 {
            for (i, q) in cols.iter().enumerate() {
                let c = q.dot(&v);
                h[(i, j)] += c;
                v.axpy(-c, q, 1.0);
            }
        }
        let hn = norm(&v);
        if hn <= RANK_TOL * anorm {
            let m = j + 1;
            return Ok(KrylovBasis {
                w: columns_or_empty(n, &cols),
                h: h.view((0, 0), (m, m)).into_owned(),
                m,
                exhausted: true,
            });
        }
        h[(j + 1, j)] = hn;
        cols.push(v / hn);
    }
    Ok(KrylovBasis {
        w: columns_or_empty(n, &cols),
        h,
        m: k,
        exhausted: false,
    })
}

fn columns_or_empty(n: usize, cols: &[Vector]) -> DMatrix<f64> {
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(cols)
    }
}

/// An oracle iterate together with the subspace dimension actually used.
#[derive(Debug, Clone)]
pub struct KrylovSolution {
    pub x: Vector,
    pub k_used: usize,
    /// The request exceeded the grade and was clamped to it.
    pub clamped: bool,
}

fn e1(len: usize, scale: f64) -> Vector {
    let mut e = Vector::zeros(len);
    if len > 0 {
        e[0] = scale;
    }
    e
}

/// `x_k = W_k y`, `y = argmin ‖γ₁e₁ − H_{k+1,k} y‖₂` (minimum-norm when the
/// projected problem is rank deficient).
pub fn explicit_krylov_minres(a: &DMatrix<f64>, b: &Vector, k: usize) -> Result<KrylovSolution> {
    let kb = krylov_basis(a, b, k)?;
    let m = kb.m;
    if m == 0 {
        return Ok(KrylovSolution {
            x: Vector::zeros(a.nrows()),
            k_used: 0,
            clamped: false,
        });
    }
    let y = min_norm_lstsq(&kb.h, &e1(kb.h.nrows(), norm(b)));
    Ok(KrylovSolution {
        x: kb.w.columns(0, m) * y,
        k_used: m,
        clamped: kb.exhausted && m < k,
    })
}

/// `x_k = W_k y` with `H_k y = γ₁e₁`, `H_k = W_kᵀAW_k`.
pub fn explicit_krylov_galerkin(a: &DMatrix<f64>, b: &Vector, k: usize) -> Result<Vector> {
    let kb = krylov_basis(a, b, k)?;
    let m = kb.m;
    if m == 0 {
        return Ok(Vector::zeros(a.nrows()));
    }
    let hk = kb.h.view((0, 0), (m, m)).into_owned();
    let sv = singular_values(&hk);
    let scale = sv[0].max(a.norm() * f64::EPSILON);
    if sv[m - 1] <= RANK_TOL * scale {
        return Err(Error::GalerkinUndefined { k: m });
    }
    let y = hk
        .lu()
        .solve(&e1(m, norm(b)))
        .ok_or(Error::GalerkinUndefined { k: m })?;
    Ok(kb.w.columns(0, m) * y)
}

/// `x_k = W_k T†_{k−1,k} γ₁e₁` with `T_{k−1,k} = W_{k−1}ᵀAW_k`: the
/// minimum-length point satisfying the first `k − 1` Galerkin equations.
/// Beyond the grade this is the full-space solve.
pub fn explicit_minlen_galerkin(a: &DMatrix<f64>, b: &Vector, k: usize) -> Result<Vector> {
    let kb = krylov_basis(a, b, k)?;
    let m = kb.m;
    if m == 0 {
        return Ok(Vector::zeros(a.nrows()));
    }
    let rows = if kb.exhausted && m < k { m } else { m - 1 };
    let t = kb.h.view((0, 0), (rows, m)).into_owned();
    let y = min_norm_lstsq(&t, &e1(rows, norm(b)));
    Ok(kb.w.columns(0, m) * y)
}

/// Orthonormal basis of `𝒦_j(M, c)` (twice-iterated Gram–Schmidt).
fn plain_krylov(m: &DMatrix<f64>, c: &Vector, j: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut cols: Vec<Vector> = Vec::new();
    let mut v = c.clone();
    let scale = m.norm().max(norm(c)).max(f64::MIN_POSITIVE);
    for _ in 0..j {
        for _ in 0..2 {
            for q in &cols {
                let h = q.dot(&v);
                v.axpy(-h, q, 1.0);
            }
        }
        let nv = norm(&v);
        if nv <= RANK_TOL * scale {
            break;
        }
        let q = &v / nv;
        v = m * &q;
        cols.push(q);
    }
    columns_or_empty(n, &cols)
}

/// `argmin ‖b − Ax‖₂` over `x ∈ 𝒦_j(AᵀA, Aᵀb)`.
pub fn explicit_lsqr(a: &DMatrix<f64>, b: &Vector, j: usize) -> Result<Vector> {
    check_size(a)?;
    check_rhs(a, b)?;
    let at = a.transpose();
    let v = plain_krylov(&(&at * a), &(&at * b), j);
    if v.ncols() == 0 {
        return Ok(Vector::zeros(a.nrows()));
    }
    let y = min_norm_lstsq(&(a * &v), b);
    Ok(v * y)
}

/// Galerkin point of `AAᵀy = b` on `𝒦_j(AAᵀ, b)`, returned as `x = Aᵀy`.
pub fn explicit_craig(a: &DMatrix<f64>, b: &Vector, j: usize) -> Result<Vector> {
    check_size(a)?;
    check_rhs(a, b)?;
    let aat = a * a.transpose();
    let u = plain_krylov(&aat, b, j);
    let m = u.ncols();
    if m == 0 {
        return Ok(Vector::zeros(a.nrows()));
    }
    let g = u.transpose() * &aat * &u;
    let t = g
        .cholesky()
        .ok_or(Error::GalerkinUndefined { k: m })?
        .solve(&(u.transpose() * b));
    Ok(a.transpose() * (u * t))
}

/// Minimum-residual point over `𝒦_k(A, b)` by an independent route:
/// Householder QR of the column-scaled monomial Krylov matrix, then the
/// normal equations of the projected least-squares problem solved by
/// fully pivoted LU. Well conditioned only for small `k`.
pub fn normal_equations_minres(a: &DMatrix<f64>, b: &Vector, k: usize) -> Result<Vector> {
    check_size(a)?;
    check_rhs(a, b)?;
    let n = a.nrows();
    if k == 0 {
        return Ok(Vector::zeros(n));
    }
    let mut cols = Vec::with_capacity(k);
    let mut v = b.clone();
    for _ in 0..k {
        let nv = norm(&v);
        if nv == 0.0 {
            break;
        }
        v /= nv;
        cols.push(v.clone());
        v = a * &v;
    }
    let kmat = DMatrix::from_columns(&cols);
    let q = kmat.qr().q();
    let aq = a * &q;
    let normal = aq.transpose() * &aq;
    let rhs = aq.transpose() * b;
    let c = normal
        .full_piv_lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("projected normal equations are singular".into()))?;
    Ok(q * c)
}

/// Runs Lanczos on `S` and Golub–Kahan on `A = αI + S` from the same `b`
/// (both fully reorthogonalized) and checks, for `j ≤ steps`:
/// `α_j ≥ √(α² + γ₂ⱼ²)`, `α_j > γ₂ⱼ`, `β_{j+1} = γ₂ⱼ₊₁γ₂ⱼ/α_j` and
/// `u_{j+1} = (−1)ʲ w₂ⱼ₊₁`.
///
/// Component deviations: `alpha_bound` is the relative shortfall below the
/// lower bound, `beta_identity` is `|β_{j+1} − γ₂ⱼ₊₁γ₂ⱼ/α_j| / γ₂ⱼ₊₁`,
/// `u_identity` the vector distance. `α_j ≤ γ₂ⱼ` is a hard failure.
///
/// Once Ritz values converge, the coefficients of either process become
/// ill-determined functions of `b` and the two computations drift apart
/// geometrically. The check therefore stops at `steps` or at the first `j`
/// where a Golub–Kahan run from `b` perturbed by [`GK_PROBE_SIZE`] moves
/// `α_j`, `β_{j+1}` or `u_{j+1}` by more than [`GK_PROBE_LIMIT`] relative,
/// whichever comes first. The `k₀ = ⌈ℓ/2⌉` termination rule is checked only when
/// Golub–Kahan stops inside that range.
pub fn gk_shifted_properties_check(
    a: &LinearOperator,
    b: &Vector,
    steps: usize,
) -> Result<DeviationReport> {
    let alpha = a.shift().ok_or(Error::StructureMismatch {
        required: "shifted-skew",
        found: a.structure().name(),
    })?;
    let s = a.skew_part().expect("shifted operator has a skew part");
    let opts = ProcessOptions::reorthogonalized();
    let steps = steps.max(1);
    let mut lz = Lanczos::new(s, b, opts)?;
    lz.run(2 * steps.min(a.n()) + 2)?;
    let mut gk = GolubKahan::new(a, b, opts)?;
    gk.run(steps.min(a.n()) + 1)?;
    let determined = well_determined_steps(a, b, &gk, opts)?;
    let steps = steps.min(determined);

    let gamma = |i: usize| lz.gammas().get(i - 1).copied().unwrap_or(0.0);
    let w = lz.basis().expect("basis stored");
    let us = gk.basis_u().expect("basis stored");
    let mut report = DeviationReport::new("appendix-gk");
    let jmax = gk.alphas().len().min(steps);
    report.note(format!(
        "compared j = 1..={jmax} (coefficients well determined through j = {determined})"
    ));
    for j in 1..=jmax {
        let aj = gk.alphas()[j - 1];
        let g2j = gamma(2 * j);
        let bound = (alpha * alpha + g2j * g2j).sqrt();
        let shortfall = ((bound - aj) / bound).max(0.0);
        report.component("alpha_bound", shortfall);
        report.push(j, shortfall);
        if !(aj > g2j) {
            report.fail(format!(
                "j={j}: α_j = {aj:e} is not greater than γ₂ⱼ = {g2j:e}"
            ));
        }
        if let Some(&bj1) = gk.betas().get(j) {
            let g2j1 = gamma(2 * j + 1);
            let predicted = g2j1 * g2j / aj;
            let dev = (bj1 - predicted).abs() / if g2j1 > 0.0 { g2j1 } else { 1.0 };
            report.component("beta_identity", dev);
            report.push(j, dev);
            if bj1 > 0.0 && !(bj1 < g2j1) {
                report.fail(format!(
                    "j={j}: β_(j+1) = {bj1:e} is not below γ₂ⱼ₊₁ = {g2j1:e}"
                ));
            }
            if let (Some(u), Some(wv)) = (us.get(j), w.get(2 * j)) {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let dev = norm(&(u - wv * sign));
                report.component("u_identity", dev);
                report.push(j, dev);
            }
        }
    }
    match gk.termination() {
        Some((k0, TerminationSide::BetaZero)) if k0 <= steps => {
            let l = lz.grade().unwrap_or(0);
            report.note(format!(
                "Golub–Kahan stopped with β = 0 at k₀ = {k0}; Lanczos grade ℓ = {l}"
            ));
            if k0 != l.div_ceil(2) {
                report.fail(format!("k₀ = {k0} differs from ⌈ℓ/2⌉ = {}", l.div_ceil(2)));
            }
        }
        Some((k0, TerminationSide::AlphaZero)) => report.fail(format!(
            "α-side termination at k₀ = {k0} is impossible for α ≠ 0"
        )),
        _ => report.note(format!(
            "Golub–Kahan did not terminate within {steps} steps"
        )),
    }
    if alpha != 0.0
        && (gk.alphas()[0] - ((alpha * alpha + gamma(2) * gamma(2)).sqrt())).abs()
            > 1e-12 * gk.alphas()[0]
    {
        report.fail("α₁ differs from √(α² + γ₂²)".into());
    }
    Ok(report)
}

/// Relative size of the right-hand-side perturbation used to probe how well
/// the Golub–Kahan coefficients are determined.
pub const GK_PROBE_SIZE: f64 = 1e-13;
/// Largest relative coefficient change, under the probe, that still counts
/// as well determined.
pub const GK_PROBE_LIMIT: f64 = 1e-10;

/// Last `j` at which `α_j`, `β_{j+1}` and `u_{j+1}` move by at most
/// `GK_PROBE_LIMIT` when `b` is perturbed by `GK_PROBE_SIZE`.
fn well_determined_steps(
    a: &LinearOperator,
    b: &Vector,
    gk: &GolubKahan<'_>,
    opts: ProcessOptions,
) -> Result<usize> {
    let mut r = SplitMix64::new(0x9e0b).vector(b.len());
    r *= GK_PROBE_SIZE * norm(b) / norm(&r);
    let mut probe = GolubKahan::new(a, &(b + r), opts)?;
    probe.run(gk.alphas().len())?;
    let moved = |x: f64, y: f64| {
        let scale = x.abs().max(y.abs());
        scale > 0.0 && (x - y).abs() > GK_PROBE_LIMIT * scale
    };
    let terminated = gk.termination().map(|(k, _)| k);
    for j in 1..=gk.alphas().len() {
        let (Some(&a1), Some(&a2)) = (gk.alphas().get(j - 1), probe.alphas().get(j - 1)) else {
            return Ok(j - 1);
        };
        if moved(a1, a2) {
            return Ok(j - 1);
        }
        if terminated == Some(j) {
            return Ok(j);
        }
        if let (Some(&b1), Some(&b2)) = (gk.betas().get(j), probe.betas().get(j)) {
            if moved(b1, b2) {
                return Ok(j - 1);
            }
        }
        let u = |g: &GolubKahan<'_>| g.basis_u().and_then(|us| us.get(j).cloned());
        if let (Some(u1), Some(u2)) = (u(gk), u(&probe)) {
            if norm(&(u1 - u2)) > GK_PROBE_LIMIT {
                return Ok(j - 1);
            }
        }
    }
    Ok(gk.alphas().len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{conv2d_skew, example_rhs, random_singular_skew, tridiag_skew, RhsKind};
    use crate::rng::SplitMix64;

    fn dense(op: &LinearOperator) -> DMatrix<f64> {
        op.to_dense()
    }

    fn x_star(n: usize) -> Vector {
        Vector::from_fn(n, |i, _| {
            if i % 2 == 1 {
                std::f64::consts::FRAC_1_SQRT_2
            } else {
                0.0
            }
        })
    }

    #[test]
    fn pseudoinverse_small_cases() {
        let s = dense(&tridiag_skew(2, 1.0));
        let x = dense_pseudoinverse_solution(&s, &Vector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!((x - Vector::from_vec(vec![0.0, 1.0])).norm() < 1e-15);
        let z = DMatrix::zeros(3, 3);
        let x = dense_pseudoinverse_solution(&z, &Vector::from_vec(vec![1.0, 0.0, 0.0])).unwrap();
        assert_eq!(x, Vector::zeros(3));
    }

    #[test]
    fn pseudoinverse_of_consistent_example() {
        let s = dense(&tridiag_skew(49, 1.0));
        let b = example_rhs(RhsKind::Consistent, 49).unwrap();
        let x = dense_pseudoinverse_solution(&s, &b).unwrap();
        assert!((x - x_star(49)).norm() < 1e-12);
        assert!(is_consistent(&s, &b).unwrap());
        let bi = example_rhs(RhsKind::Inconsistent, 49).unwrap();
        assert!(!is_consistent(&s, &bi).unwrap());
    }

    #[test]
    fn moore_penrose_identities_hold() {
        let mut rng = SplitMix64::new(11);
        for op in [
            tridiag_skew(49, 1.0),
            random_singular_skew(20, 12, &mut rng),
            conv2d_skew(5, 0.4, 0.6),
        ] {
            let a = dense(&op);
            let p = pseudo_inverse(&a).unwrap();
            for r in moore_penrose_residuals(&a, &p) {
                assert!(r <= 1e-10, "{r}");
            }
        }
    }

    #[test]
    fn null_space_is_orthogonal_to_pinv_solution() {
        let mut rng = SplitMix64::new(5);
        let s = dense(&random_singular_skew(30, 18, &mut rng));
        let nsp = null_space_basis(&s).unwrap();
        assert_eq!(nsp.ncols(), 12);
        let b = &s * rng.vector(30);
        let x = dense_pseudoinverse_solution(&s, &b).unwrap();
        assert!((nsp.transpose() * x).norm() <= 1e-10 * b.norm().max(1.0));
    }

    #[test]
    fn size_cap_is_enforced() {
        let a = DMatrix::zeros(401, 401);
        assert!(matches!(
            dense_pseudoinverse_solution(&a, &Vector::zeros(401)),
            Err(Error::OracleTooLarge { n: 401, limit: 400 })
        ));
    }

    #[test]
    fn krylov_oracles_on_two_by_two() {
        let s = dense(&tridiag_skew(2, 1.0));
        let a = DMatrix::identity(2, 2) + &s;
        let b = Vector::from_vec(vec![1.0, 0.0]);
        let half = Vector::from_vec(vec![0.5, 0.5]);
        assert!((explicit_krylov_minres(&a, &b, 2).unwrap().x - &half).norm() < 1e-15);
        assert_eq!(
            explicit_krylov_minres(&a, &b, 0).unwrap().x,
            Vector::zeros(2)
        );
        assert!(
            (explicit_krylov_galerkin(&s, &b, 2).unwrap() - Vector::from_vec(vec![0.0, 1.0]))
                .norm()
                < 1e-15
        );
        assert!(
            (explicit_krylov_galerkin(&a, &b, 1).unwrap() - Vector::from_vec(vec![1.0, 0.0]))
                .norm()
                < 1e-15
        );
        assert!((explicit_minlen_galerkin(&a, &b, 2).unwrap() - &half).norm() < 1e-15);
        assert!((explicit_minlen_galerkin(&a, &b, 5).unwrap() - &half).norm() < 1e-15);
        assert!((explicit_craig(&a, &b, 1).unwrap() - &half).norm() < 1e-15);
        assert!(
            (explicit_lsqr(&s, &b, 1).unwrap() - Vector::from_vec(vec![0.0, 1.0])).norm() < 1e-15
        );
    }

    #[test]
    fn minres_oracle_clamps_and_reaches_solution() {
        let s = dense(&tridiag_skew(49, 1.0));
        let b = example_rhs(RhsKind::Consistent, 49).unwrap();
        let sol = explicit_krylov_minres(&s, &b, 30).unwrap();
        assert!(sol.clamped);
        assert_eq!(sol.k_used, 24);
        assert!((sol.x - x_star(49)).norm() < 1e-10);
        let x24 = explicit_krylov_minres(&s, &b, 24).unwrap().x;
        assert!((x24 - x_star(49)).norm() < 1e-10);
    }

    #[test]
    fn galerkin_undefined_at_odd_k_for_skew() {
        let s = dense(&tridiag_skew(49, 1.0));
        let b = example_rhs(RhsKind::Consistent, 49).unwrap();
        assert!(matches!(
            explicit_krylov_galerkin(&s, &b, 3),
            Err(Error::GalerkinUndefined { k: 3 })
        ));
        assert!(explicit_krylov_galerkin(&s, &b, 4).is_ok());
    }

    #[test]
    fn minlen_even_and_odd_coincide() {
        let s = dense(&conv2d_skew(4, 0.4, 0.6));
        let a = DMatrix::identity(16, 16) * 0.8 + &s;
        let b = Vector::from_fn(16, |i, _| (i as f64).cos());
        let x2 = explicit_minlen_galerkin(&a, &b, 2).unwrap();
        let x3 = explicit_minlen_galerkin(&a, &b, 3).unwrap();
        assert!((x2 - x3).norm() < 1e-12);
    }

    #[test]
    fn independent_minres_formulation_agrees() {
        let mut rng = SplitMix64::new(99);
        for trial in 0..10 {
            let s = crate::operators::random_skew(20, &mut rng).to_dense() * 2.0;
            let alpha = rng.uniform_in(1.0, 3.0);
            let a = DMatrix::identity(20, 20) * alpha + s;
            let b = rng.vector(20);
            for k in 1..=6 {
                let x1 = explicit_krylov_minres(&a, &b, k).unwrap().x;
                let x2 = normal_equations_minres(&a, &b, k).unwrap();
                assert!(
                    (&x1 - &x2).norm() <= 1e-8 * x1.norm(),
                    "trial {trial} k {k}"
                );
            }
        }
    }

    #[test]
    fn appendix_properties_on_small_cases() {
        let a = LinearOperator::shifted(1.0, tridiag_skew(2, 1.0)).unwrap();
        let b = Vector::from_vec(vec![1.0, 0.0]);
        let r = gk_shifted_properties_check(&a, &b, 10).unwrap();
        assert!(r.passes(1e-10), "{}", r.render(1e-10));

        let a = LinearOperator::shifted(0.8, tridiag_skew(4, 0.0)).unwrap();
        let b = Vector::from_vec(vec![1.0, 2.0, 0.0, 0.0]);
        let r = gk_shifted_properties_check(&a, &b, 10).unwrap();
        assert!(r.passes(1e-10), "{}", r.render(1e-10));
    }

    #[test]
    fn spectral_radius_of_tridiagonal() {
        let m = 10;
        let s = dense(&tridiag_skew(m, 0.5));
        let r = dense_skew_spectral_radius(&s).unwrap();
        let expect = 2.0 * 0.5 * (std::f64::consts::PI / (m as f64 + 1.0)).cos();
        assert!((r - expect).abs() < 1e-12);
    }
}
