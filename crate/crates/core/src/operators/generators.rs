//! Test-matrix and right-hand-side generators.

use nalgebra::DMatrix;

use super::{CsrMatrix, LinearOperator};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::vector::Vector;

/// `Sₘ(σ)`: σ on the superdiagonal, −σ on the subdiagonal, zero diagonal.
pub fn tridiag_skew(m: usize, sigma: f64) -> LinearOperator {
    assert!(m >= 1, "tridiag_skew needs m ≥ 1");
    let mut t = Vec::with_capacity(2 * m);
    for i in 0..m.saturating_sub(1) {
        t.push((i, i + 1, sigma));
        t.push((i + 1, i, -sigma));
    }
    LinearOperator::from_csr(CsrMatrix::from_triplets(m, &t)).assume_skew()
}

/// `S = Iₘ ⊗ Sₘ(σ₁) + Sₘ(σ₂) ⊗ Iₘ`, the `m²×m²` centred-difference
/// discretization of a constant convection term on the unit square.
pub fn conv2d_skew(m: usize, sigma1: f64, sigma2: f64) -> LinearOperator {
    assert!(m >= 1, "conv2d_skew needs m ≥ 1");
    let n = m * m;
    let mut t = Vec::with_capacity(4 * n);
    for a in 0..m.saturating_sub(1) {
        for blk in 0..m {
            // Iₘ ⊗ Sₘ(σ₁): block diagonal
            t.push((blk * m + a, blk * m + a + 1, sigma1));
            t.push((blk * m + a + 1, blk * m + a, -sigma1));
            // Sₘ(σ₂) ⊗ Iₘ: couples blocks a and a+1
            t.push((a * m + blk, (a + 1) * m + blk, sigma2));
            t.push(((a + 1) * m + blk, a * m + blk, -sigma2));
        }
    }
    LinearOperator::from_csr(CsrMatrix::from_triplets(n, &t)).assume_skew()
}

/// Dense random skew matrix with entries uniform in `[−1, 1)/√n`.
pub fn random_skew(n: usize, rng: &mut SplitMix64) -> LinearOperator {
    let scale = 1.0 / (n as f64).sqrt();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.symmetric() * scale;
            d[(i, j)] = v;
            d[(j, i)] = -v;
        }
    }
    LinearOperator::from_dense(d).unwrap().assume_skew()
}

/// Dense random skew matrix of the given (even) rank, `S = M K Mᵀ` with
/// `M` random `n×rank` and `K` random skew `rank×rank`.
pub fn random_singular_skew(n: usize, rank: usize, rng: &mut SplitMix64) -> LinearOperator {
    assert!(
        rank.is_multiple_of(2) && rank <= n,
        "rank must be even and at most n"
    );
    let m = DMatrix::from_fn(n, rank, |_, _| rng.symmetric());
    let mut k = DMatrix::zeros(rank, rank);
    for i in 0..rank {
        for j in i + 1..rank {
            let v = rng.symmetric();
            k[(i, j)] = v;
            k[(j, i)] = -v;
        }
    }
    let x = &m * k * m.transpose();
    let scale = 1.0 / n as f64;
    let s = (&x - x.transpose()) * (0.5 * scale);
    LinearOperator::from_dense(s).unwrap().assume_skew()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    /// `[1/√2, 0, …, 0, −1/√2]ᵀ`
    Consistent,
    /// `[1/√2, 0, …, 0, +1/√2]ᵀ`
    Inconsistent,
}

/// Right-hand sides of the singular tridiagonal experiment; both have unit
/// norm.
pub fn example_rhs(kind: RhsKind, n: usize) -> Result<Vector> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "example right-hand side needs n ≥ 2, got {n}"
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut b = Vector::zeros(n);
    b[0] = h;
    b[n - 1] = match kind {
        RhsKind::Consistent => -h,
        RhsKind::Inconsistent => h,
    };
    Ok(b)
}

/// Seeded right-hand side with entries uniform in `[−1, 1)`.
pub fn random_rhs(n: usize, seed: u64) -> Vector {
    SplitMix64::new(seed).vector(n)
}
