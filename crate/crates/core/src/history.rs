//! Solver configuration, per-iteration records and convergence histories.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::vector::{norm, Vector};

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Stop once the residual estimate is at most `tol·‖b‖₂`.
    pub tol: f64,
    /// Iteration cap; `None` means `4n`.
    pub max_iters: Option<usize>,
    /// Scale of the zero test for process normalizations.
    pub breakdown_tol: f64,
    /// Keep the full basis of the underlying process.
    pub store_basis: bool,
    /// Fully reorthogonalize the underlying process (implies `store_basis`).
    pub reorthogonalize: bool,
    /// Seed for random right-hand sides.
    pub seed: u64,
    /// Keep every iterate in the history.
    pub keep_iterates: bool,
    /// When set, each record carries `‖x_k − reference‖₂`.
    pub reference: Option<Vector>,
    /// Compute `‖b − A x_k‖₂` explicitly at every iteration (one extra
    /// product per step). When off, `residual_norm` repeats the estimate.
    pub true_residual: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: None,
            breakdown_tol: 1e-13,
            store_basis: false,
            reorthogonalize: false,
            seed: 0,
            keep_iterates: false,
            reference: None,
            true_residual: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == Some(0) {
            return Err(Error::InvalidArgument(
                "max_iters must be at least 1".into(),
            ));
        }
        if !(self.breakdown_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "breakdown_tol must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn max_iters_for(&self, n: usize) -> usize {
        self.max_iters.unwrap_or(4 * n).max(1)
    }

    pub fn with_iterates(mut self) -> Self {
        self.keep_iterates = true;
        self
    }

    pub fn with_reference(mut self, x: Vector) -> Self {
        self.reference = Some(x);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    S2cg,
    S2mr,
    Craig,
    Lsqr,
    S3cg,
    S3mr,
    S3lq,
    Usymlq,
    Usymqr,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::S2cg,
        Method::S2mr,
        Method::Craig,
        Method::Lsqr,
        Method::S3cg,
        Method::S3mr,
        Method::S3lq,
        Method::Usymlq,
        Method::Usymqr,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::S2cg => "s2cg",
            Method::S2mr => "s2mr",
            Method::Craig => "craig",
            Method::Lsqr => "lsqr",
            Method::S3cg => "s3cg",
            Method::S3mr => "s3mr",
            Method::S3lq => "s3lq",
            Method::Usymlq => "usymlq",
            Method::Usymqr => "usymqr",
        }
    }

    /// Methods that need a skew operator (`α = 0`).
    pub fn requires_skew(&self) -> bool {
        matches!(self, Method::S2cg | Method::S2mr)
    }

    /// Methods that need a shifted skew operator (`α ≠ 0`).
    pub fn requires_shift(&self) -> bool {
        matches!(self, Method::S3cg | Method::S3mr | Method::S3lq)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown solver {s:?}")))
    }
}

/// How a solve ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Residual estimate fell below `tol·‖b‖₂`.
    Converged,
    /// The underlying process terminated (Krylov space exhausted). The last
    /// iterate is the exact, or pseudoinverse, solution in exact arithmetic.
    Exhausted { iter: usize },
    /// Iteration cap reached first.
    MaxIterations,
    /// The method does not apply to this system (S²CG on `b ∉ ran(A)`).
    NotApplicable { iter: usize, reason: &'static str },
    /// The method broke down (CRAIG on an inconsistent system, one-sided
    /// SSY termination). The last iterate is kept.
    Breakdown { iter: usize, reason: &'static str },
}

impl Outcome {
    /// Converged or exhausted.
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Converged | Outcome::Exhausted { .. })
    }

    pub fn describe(&self) -> String {
        match self {
            Outcome::Converged => "converged".into(),
            Outcome::Exhausted { iter } => format!("Krylov space exhausted at iteration {iter}"),
            Outcome::MaxIterations => "iteration cap reached".into(),
            Outcome::NotApplicable { iter, reason } => {
                format!("method not applicable (iteration {iter}): {reason}")
            }
            Outcome::Breakdown { iter, reason } => {
                format!("breakdown at iteration {iter}: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    /// `‖b − A x_k‖₂`, computed directly when `true_residual` is on.
    pub residual_norm: f64,
    pub error_norm: Option<f64>,
    /// The solver's own residual (or, for LQ points, residual-formula) estimate.
    pub estimate_norm: f64,
    pub elapsed_ns: u64,
    pub iterate: Option<Vector>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceHistory {
    pub method: Method,
    pub records: Vec<IterationRecord>,
    /// Galerkin points emitted alongside an LQ solve.
    pub galerkin: Vec<IterationRecord>,
    /// Iterations at which a requested Galerkin point was undefined.
    pub galerkin_skipped: Vec<usize>,
    pub solution: Vector,
    pub outcome: Outcome,
}

impl ConvergenceHistory {
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn record(&self, iter: usize) -> Option<&IterationRecord> {
        self.records.iter().find(|r| r.iter == iter)
    }

    /// Stored iterate `x_k` (requires `keep_iterates`).
    pub fn iterate(&self, iter: usize) -> Option<&Vector> {
        self.record(iter).and_then(|r| r.iterate.as_ref())
    }

    pub fn galerkin_iterate(&self, iter: usize) -> Option<&Vector> {
        self.galerkin
            .iter()
            .find(|r| r.iter == iter)
            .and_then(|r| r.iterate.as_ref())
    }

    /// CSV with header `iter,residual_norm,error_norm,estimate_norm,elapsed_ns`.
    /// Reals use the shortest representation that round-trips, in exponent form.
    /// `comments` become leading `# ` lines. When `timing` is off the
    /// elapsed column is written as 0 so repeated runs are byte-identical.
    pub fn to_csv(&self, comments: &[String], timing: bool) -> String {
        records_to_csv(&self.records, comments, timing)
    }
}

pub fn records_to_csv(records: &[IterationRecord], comments: &[String], timing: bool) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("iter,residual_norm,error_norm,estimate_norm,elapsed_ns\n");
    for r in records {
        let err = r.error_norm.map(|e| format!("{e:e}")).unwrap_or_default();
        let ns = if timing { r.elapsed_ns } else { 0 };
        out.push_str(&format!(
            "{},{:e},{},{:e},{}\n",
            r.iter, r.residual_norm, err, r.estimate_norm, ns
        ));
    }
    out
}

/// Builds records as a solver runs.
pub(crate) struct Recorder<'a> {
    op: &'a LinearOperator,
    b: &'a Vector,
    cfg: &'a SolverConfig,
    start: Instant,
    records: Vec<IterationRecord>,
    galerkin: Vec<IterationRecord>,
    galerkin_skipped: Vec<usize>,
}

impl<'a> Recorder<'a> {
    pub fn new(op: &'a LinearOperator, b: &'a Vector, cfg: &'a SolverConfig) -> Self {
        Self {
            op,
            b,
            cfg,
            start: Instant::now(),
            records: Vec::new(),
            galerkin: Vec::new(),
            galerkin_skipped: Vec::new(),
        }
    }

    fn make(&self, iter: usize, x: &Vector, estimate: f64) -> IterationRecord {
        let residual_norm = if self.cfg.true_residual {
            let ax = self.op.apply(x).expect("iterate length matches operator");
            norm(&(self.b - ax))
        } else {
            estimate
        };
        IterationRecord {
            iter,
            residual_norm,
            error_norm: self.cfg.reference.as_ref().map(|r| norm(&(x - r))),
            estimate_norm: estimate.abs(),
            elapsed_ns: self.start.elapsed().as_nanos() as u64,
            iterate: self.cfg.keep_iterates.then(|| x.clone()),
        }
    }

    pub fn record(&mut self, iter: usize, x: &Vector, estimate: f64) {
        let r = self.make(iter, x, estimate);
        self.records.push(r);
    }

    pub fn record_galerkin(&mut self, iter: usize, x: &Vector, estimate: f64) {
        let r = self.make(iter, x, estimate);
        self.galerkin.push(r);
    }

    pub fn skip_galerkin(&mut self, iter: usize) {
        self.galerkin_skipped.push(iter);
    }

    pub fn finish(self, method: Method, solution: Vector, outcome: Outcome) -> ConvergenceHistory {
        ConvergenceHistory {
            method,
            records: self.records,
            galerkin: self.galerkin,
            galerkin_skipped: self.galerkin_skipped,
            solution,
            outcome,
        }
    }
}
