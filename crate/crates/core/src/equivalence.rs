//! Deviation reports for the equivalence checks between processes and
//! between solvers.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::history::{ConvergenceHistory, SolverConfig};
use crate::operators::LinearOperator;
use crate::shifted_solvers::{s3cg_solve, s3lq_solve, s3mr_solve, usymlq_solve, usymqr_solve};
use crate::skew_solvers::{craig_solve, lsqr_solve, s2cg_solve, s2mr_solve};
use crate::vector::{norm, Vector};

/// Default pass threshold for relative deviations.
pub const DEFAULT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationRow {
    pub index: usize,
    pub deviation: f64,
}

/// Per-index maximum deviations, named component maxima, free-form notes,
/// and hard failures that fail the check regardless of the threshold.
#[derive(Debug, Clone, Default)]
pub struct DeviationReport {
    pub check: String,
    pub rows: Vec<DeviationRow>,
    pub components: Vec<(String, f64)>,
    pub notes: Vec<String>,
    pub failures: Vec<String>,
}

impl DeviationReport {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            ..Self::default()
        }
    }

    /// Records `deviation` at `index`, keeping the maximum per index.
    pub fn push(&mut self, index: usize, deviation: f64) {
        match self.rows.iter_mut().find(|r| r.index == index) {
            Some(r) => r.deviation = max_nan(r.deviation, deviation),
            None => self.rows.push(DeviationRow { index, deviation }),
        }
    }

    pub fn component(&mut self, name: &str, deviation: f64) {
        match self.components.iter_mut().find(|(n, _)| n == name) {
            Some((_, d)) => *d = max_nan(*d, deviation),
            None => self.components.push((name.to_string(), deviation)),
        }
    }

    pub fn component_value(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|(n, _)| n == name).map(|c| c.1)
    }

    pub fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    pub fn fail(&mut self, text: String) {
        self.failures.push(text);
    }

    /// Largest deviation seen (NaN if any deviation is NaN).
    pub fn max_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.deviation)
            .chain(self.components.iter().map(|c| c.1))
            .fold(0.0, max_nan)
    }

    pub fn passes(&self, threshold: f64) -> bool {
        let m = self.max_deviation();
        self.failures.is_empty() && !m.is_nan() && m <= threshold
    }

    pub fn render(&self, threshold: f64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "check: {}", self.check);
        if !self.rows.is_empty() {
            let _ = writeln!(out, "index,max_deviation");
            let mut rows = self.rows.clone();
            rows.sort_by_key(|r| r.index);
            for r in rows {
                let _ = writeln!(out, "{},{:e}", r.index, r.deviation);
            }
        }
        for (name, d) in &self.components {
            let _ = writeln!(out, "component {name}: {d:e}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        for f in &self.failures {
            let _ = writeln!(out, "failure: {f}");
        }
        let _ = writeln!(
            out,
            "max deviation {:e} (threshold {:e}): {}",
            self.max_deviation(),
            threshold,
            if self.passes(threshold) {
                "PASS"
            } else {
                "FAIL"
            }
        );
        out
    }
}

fn max_nan(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// `‖a − b‖₂ / max(‖b‖₂, floor)`.
pub fn vector_deviation(a: &Vector, b: &Vector, floor: f64) -> f64 {
    norm(&(a - b)) / norm(b).max(floor)
}

/// `|a − b| / max(|a|, |b|)`, zero when both vanish.
pub fn scalar_deviation(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Iterate-level identities between pairs of solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverCheck {
    /// `x^G_{2j} = x_j^CRAIG` on consistent skew systems.
    S2cgCraig,
    /// `x^M_{2j} = x^M_{2j+1} = x_j^LSQR` on skew systems.
    S2mrLsqr,
    /// `x^G_{2k} = x_k^CRAIG` on shifted systems.
    S3cgCraig,
    /// `x^L_{2j} = x^L_{2j+1} = x^G_{2j}` on shifted systems.
    S3lqS3cg,
    /// `x^M_k = x_k^USYMQR` with `c = b`.
    S3mrUsymqr,
    /// `x^L_k = x_k^USYMLQ` with `c = b`.
    S3lqUsymlq,
}

impl SolverCheck {
    pub const ALL: [SolverCheck; 6] = [
        SolverCheck::S2cgCraig,
        SolverCheck::S2mrLsqr,
        SolverCheck::S3cgCraig,
        SolverCheck::S3lqS3cg,
        SolverCheck::S3mrUsymqr,
        SolverCheck::S3lqUsymlq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SolverCheck::S2cgCraig => "s2cg-craig",
            SolverCheck::S2mrLsqr => "s2mr-lsqr",
            SolverCheck::S3cgCraig => "s3cg-craig",
            SolverCheck::S3lqS3cg => "s3lq-s3cg",
            SolverCheck::S3mrUsymqr => "s3mr-usymqr",
            SolverCheck::S3lqUsymlq => "s3lq-usymlq",
        }
    }

    /// Skew checks need `α = 0`; the others a shifted operator.
    pub fn requires_skew(&self) -> bool {
        matches!(self, SolverCheck::S2cgCraig | SolverCheck::S2mrLsqr)
    }
}

impl FromStr for SolverCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown solver check '{s}'")))
    }
}

/// Runs both solvers of `check` with stored iterates and compares them at
/// every index where the reference (right-hand) iterate has not yet
/// converged, i.e. its true residual exceeds `10·tol·‖b‖₂`.
///
/// Deviations are `‖x − x_ref‖₂ / max(‖x_ref‖₂, floor)` with floor `0` for
/// the skew checks and `1` for the shifted ones.
pub fn check_solver_equivalence(
    check: SolverCheck,
    a: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> Result<DeviationReport> {
    let mut cfg = cfg.clone();
    cfg.keep_iterates = true;
    cfg.true_residual = true;
    let gate = 10.0 * cfg.tol * norm(b);
    let mut report = DeviationReport::new(check.name());
    let unconverged =
        |h: &ConvergenceHistory, i: usize| h.record(i).is_some_and(|r| r.residual_norm > gate);
    match check {
        SolverCheck::S2cgCraig | SolverCheck::S3cgCraig => {
            let (cg, floor) = if check == SolverCheck::S2cgCraig {
                (s2cg_solve(a, b, &cfg)?, f64::MIN_POSITIVE)
            } else {
                (s3cg_solve(a, b, &cfg)?, 1.0)
            };
            let craig = craig_solve(a, b, &cfg)?;
            for r in &craig.records {
                let j = r.iter;
                if !unconverged(&craig, j) {
                    continue;
                }
                if let (Some(x), Some(y)) = (cg.iterate(2 * j), r.iterate.as_ref()) {
                    report.push(j, vector_deviation(x, y, floor));
                }
            }
            report.note(format!("{}: {}", cg.method, cg.outcome.describe()));
            report.note(format!("craig: {}", craig.outcome.describe()));
        }
        SolverCheck::S2mrLsqr => {
            let mr = s2mr_solve(a, b, &cfg)?;
            let lsqr = lsqr_solve(a, b, &cfg)?;
            for r in &lsqr.records {
                let j = r.iter;
                if !unconverged(&lsqr, j) {
                    continue;
                }
                let y = r.iterate.as_ref().expect("iterates kept");
                for k in [2 * j, 2 * j + 1] {
                    if let Some(x) = mr.iterate(k) {
                        report.push(j, vector_deviation(x, y, f64::MIN_POSITIVE));
                    }
                }
            }
            report.note(format!("s2mr: {}", mr.outcome.describe()));
            report.note(format!("lsqr: {}", lsqr.outcome.describe()));
        }
        SolverCheck::S3lqS3cg => {
            let lq = s3lq_solve(a, b, &cfg, true)?;
            let cg = s3cg_solve(a, b, &cfg)?;
            for r in &cg.records {
                let k = r.iter;
                if k % 2 != 0 || !unconverged(&cg, k) {
                    continue;
                }
                let y = r.iterate.as_ref().expect("iterates kept");
                for i in [k, k + 1] {
                    if let Some(x) = lq.iterate(i) {
                        report.push(k, vector_deviation(x, y, 1.0));
                    }
                }
                if let Some(x) = lq.galerkin_iterate(k) {
                    report.component("lq_galerkin_point", vector_deviation(x, y, 1.0));
                }
            }
            report.note(format!("s3lq: {}", lq.outcome.describe()));
            report.note(format!("s3cg: {}", cg.outcome.describe()));
        }
        SolverCheck::S3mrUsymqr | SolverCheck::S3lqUsymlq => {
            let (short, usym) = if check == SolverCheck::S3mrUsymqr {
                (s3mr_solve(a, b, &cfg)?, usymqr_solve(a, b, b, &cfg)?)
            } else {
                (s3lq_solve(a, b, &cfg, false)?, usymlq_solve(a, b, b, &cfg)?)
            };
            for r in &usym.records {
                if !unconverged(&usym, r.iter) {
                    continue;
                }
                if let (Some(x), Some(y)) = (short.iterate(r.iter), r.iterate.as_ref()) {
                    report.push(r.iter, vector_deviation(x, y, 1.0));
                }
            }
            report.note(format!("{}: {}", short.method, short.outcome.describe()));
            report.note(format!("{}: {}", usym.method, usym.outcome.describe()));
        }
    }
    if report.rows.is_empty() {
        report.fail("no comparable iterates".into());
    }
    Ok(report)
}

/// Residual comparison `‖b − Ax^M_{2k}‖₂ ≤ ‖b − Ax_k^LSQR‖₂ + 1e-12‖b‖₂`
/// for every `k` both histories reach.
#[derive(Debug, Clone)]
pub struct ResidualComparison {
    /// `max_k (‖r^M_{2k}‖ − ‖r^LSQR_k‖) / ‖b‖`; at most `1e-12` when the
    /// inequality holds.
    pub max_excess: f64,
    /// Strict inequality held at every compared `k` before convergence.
    pub strict: bool,
    pub compared: usize,
}

pub fn compare_mr_lsqr_residuals(
    mr: &ConvergenceHistory,
    lsqr: &ConvergenceHistory,
    b_norm: f64,
    gate: f64,
) -> ResidualComparison {
    let mut out = ResidualComparison {
        max_excess: f64::NEG_INFINITY,
        strict: true,
        compared: 0,
    };
    for r in &lsqr.records {
        if let Some(m) = mr.record(2 * r.iter) {
            let excess = (m.residual_norm - r.residual_norm) / b_norm;
            out.max_excess = out.max_excess.max(excess);
            if r.residual_norm > gate && m.residual_norm >= r.residual_norm {
                out.strict = false;
            }
            out.compared += 1;
        }
    }
    out
}
