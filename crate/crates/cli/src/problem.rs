use skew_krylov::operators::{
    conv2d_skew, example_rhs, load_matrix_market, random_rhs, read_vector, tridiag_skew,
    LoadOptions, RhsKind,
};
use skew_krylov::oracle::{self, MAX_ORACLE_N};
use skew_krylov::{LinearOperator, Vector};

use crate::args::{GenKind, ProblemArgs, RhsArg};
use crate::CliError;

/// An operator with its right-hand side and a one-line description for CSV
/// comments.
pub struct Problem {
    pub op: LinearOperator,
    pub b: Vector,
    pub alpha: f64,
    pub description: String,
}

fn need<T: Copy>(value: Option<T>, flag: &str, gen: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--gen {gen} requires {flag}")))
}

pub fn build(args: &ProblemArgs) -> Result<Problem, CliError> {
    if !args.alpha.is_finite() {
        return Err(CliError::Usage("--alpha must be finite".into()));
    }
    let (base, mut description) = match (&args.matrix, args.gen) {
        (Some(path), _) => {
            let opts = LoadOptions {
                require_skew: args.alpha != 0.0,
                skew_tol: args.skew_tol,
            };
            (
                load_matrix_market(path, opts)?,
                format!("matrix={}", path.display()),
            )
        }
        (None, Some(GenKind::Tridiag)) => {
            let m = need(args.m, "--m", "tridiag")?;
            let sigma = need(args.sigma, "--sigma", "tridiag")?;
            check_m(m)?;
            (
                tridiag_skew(m, sigma),
                format!("gen=tridiag m={m} sigma={sigma}"),
            )
        }
        (None, Some(GenKind::Conv2d)) => {
            let m = need(args.m, "--m", "conv2d")?;
            let s1 = need(args.sigma1, "--sigma1", "conv2d")?;
            let s2 = need(args.sigma2, "--sigma2", "conv2d")?;
            check_m(m)?;
            (
                conv2d_skew(m, s1, s2),
                format!("gen=conv2d m={m} sigma1={s1} sigma2={s2}"),
            )
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --matrix or --gen is required".into(),
            ))
        }
    };
    description.push_str(&format!(" alpha={}", args.alpha));
    let n = base.n();
    let op = if args.alpha == 0.0 {
        base
    } else {
        LinearOperator::shifted(args.alpha, base)?
    };

    let b = match (&args.rhs, args.rhs_kind) {
        (Some(path), _) => {
            description.push_str(&format!(" rhs={}", path.display()));
            read_vector(path)?
        }
        (None, Some(RhsArg::Consistent)) => {
            description.push_str(" rhs=consistent");
            example_rhs(RhsKind::Consistent, n)?
        }
        (None, Some(RhsArg::Inconsistent)) => {
            description.push_str(" rhs=inconsistent");
            example_rhs(RhsKind::Inconsistent, n)?
        }
        (None, Some(RhsArg::Random)) => {
            description.push_str(&format!(" rhs=random seed={}", args.seed));
            random_rhs(n, args.seed)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --rhs or --rhs-kind is required".into(),
            ))
        }
    };
    if b.len() != n {
        return Err(CliError::Usage(format!(
            "right-hand side has length {} but the operator is {n}×{n}",
            b.len()
        )));
    }
    Ok(Problem {
        op,
        b,
        alpha: args.alpha,
        description,
    })
}

fn check_m(m: usize) -> Result<(), CliError> {
    if m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    Ok(())
}

/// Dense pseudoinverse solution when the problem is small enough.
pub fn oracle_reference(p: &Problem) -> Result<Option<Vector>, CliError> {
    if p.op.n() > MAX_ORACLE_N {
        return Ok(None);
    }
    Ok(Some(oracle::dense_pseudoinverse_solution(
        &p.op.to_dense(),
        &p.b,
    )?))
}
