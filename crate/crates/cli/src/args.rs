use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use skew_krylov::Method;

#[derive(Debug, Parser)]
#[command(
    name = "skew-krylov",
    version,
    about = "Krylov solvers for skew-symmetric and shifted skew-symmetric systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver and write its convergence history as CSV.
    Solve(SolveArgs),
    /// Reproduce one of the numerical experiments (one CSV per solver).
    Experiment(ExperimentArgs),
    /// Check an equivalence between processes or solvers.
    Equiv(EquivArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// `S_m(σ)`: σ on the superdiagonal, −σ on the subdiagonal.
    Tridiag,
    /// `I ⊗ S_m(σ₁) + S_m(σ₂) ⊗ I`.
    Conv2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhsArg {
    Consistent,
    Inconsistent,
    /// Uniform entries in [−1, 1) from the seeded SplitMix64 generator.
    Random,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["matrix", "gen"])))]
#[command(group(ArgGroup::new("rhs_source").required(true).args(["rhs", "rhs_kind"])))]
pub struct ProblemArgs {
    /// Matrix Market file holding S (or a general A when --alpha is 0).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Built-in generator for S.
    #[arg(long, value_enum)]
    pub gen: Option<GenKind>,
    /// Generator size parameter.
    #[arg(long)]
    pub m: Option<usize>,
    /// σ for the tridiagonal generator.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// σ₁ for the conv2d generator.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma1: Option<f64>,
    /// σ₂ for the conv2d generator.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2: Option<f64>,
    /// Shift α in A = αI + S; 0 means pure skew.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Relative tolerance of the skew check on loaded matrices.
    #[arg(long, default_value_t = 1e-12)]
    pub skew_tol: f64,
    /// Right-hand side file, one value per line.
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    /// Built-in right-hand side.
    #[arg(long, value_enum)]
    pub rhs_kind: Option<RhsArg>,
    /// Seed for --rhs-kind random.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// One of s2cg, s2mr, craig, lsqr, s3cg, s3mr, s3lq, usymlq, usymqr.
    #[arg(long)]
    pub solver: Method,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Iteration cap (default 4n).
    #[arg(long)]
    pub maxit: Option<usize>,
    /// Zero threshold for process normalizations.
    #[arg(long, default_value_t = 1e-13)]
    pub breakdown_tol: f64,
    /// Fully reorthogonalize the underlying process.
    #[arg(long)]
    pub reorthogonalize: bool,
    /// Reference solution for the error_norm column (default: dense
    /// pseudoinverse solution when n ≤ 400).
    #[arg(long, conflicts_with = "no_reference")]
    pub reference: Option<PathBuf>,
    /// Leave the error_norm column empty.
    #[arg(long)]
    pub no_reference: bool,
    /// Write wall-clock times into elapsed_ns (otherwise 0).
    #[arg(long)]
    pub timing: bool,
    /// Output CSV path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    /// Consistent singular tridiagonal system: S²CG, CRAIG, S²MR, LSQR.
    Fig1,
    /// Inconsistent singular tridiagonal system: S²MR, LSQR.
    Fig2,
    /// Shifted conv2d system: S³LQ, S³CG, CRAIG, S³MR, LSQR.
    Fig3,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    /// Directory for the CSV files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Seed for the random right-hand side of fig3.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    #[value(name = "gk-lanczos")]
    GkLanczos,
    #[value(name = "ssy-lanczos")]
    SsyLanczos,
    #[value(name = "s2cg-craig")]
    S2cgCraig,
    #[value(name = "s2mr-lsqr")]
    S2mrLsqr,
    #[value(name = "s3cg-craig")]
    S3cgCraig,
    #[value(name = "s3lq-s3cg")]
    S3lqS3cg,
    #[value(name = "s3mr-usymqr")]
    S3mrUsymqr,
    #[value(name = "s3lq-usymlq")]
    S3lqUsymlq,
    #[value(name = "appendix-gk")]
    AppendixGk,
    #[value(name = "parity")]
    Parity,
}

#[derive(Debug, Clone, Args)]
pub struct EquivArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub check: CheckName,
    /// Process steps for gk-lanczos (default 20), ssy-lanczos (default 24)
    /// and appendix-gk (default n, further limited to well-determined steps).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Pass threshold on the maximum relative deviation.
    #[arg(long, default_value_t = 1e-9)]
    pub threshold: f64,
    /// Solver tolerance for the solver-pair checks.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub reorthogonalize: bool,
}
