use std::fs;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use skew_krylov::equivalence::{check_solver_equivalence, DeviationReport, SolverCheck};
use skew_krylov::factorizations::{
    check_gk_lanczos_equivalence, check_ssy_lanczos_equivalence, termination_parity, Parity,
    ProcessOptions,
};
use skew_krylov::operators::{
    conv2d_skew, example_rhs, random_rhs, read_vector, tridiag_skew, RhsKind,
};
use skew_krylov::oracle::{self, gk_shifted_properties_check};
use skew_krylov::shifted_solvers::{
    s3cg_solve, s3lq_solve, s3mr_solve, usymlq_solve, usymqr_solve,
};
use skew_krylov::skew_solvers::{craig_solve, lsqr_solve, s2cg_solve, s2mr_solve};
use skew_krylov::{ConvergenceHistory, LinearOperator, Method, Outcome, SolverConfig, Vector};

use crate::args::{CheckName, EquivArgs, ExperimentArgs, ExperimentName, SolveArgs};
use crate::problem::{self, Problem};
use crate::{CliError, Status};

/// Usage check: skew-only solvers need `α = 0`, shifted-only ones `α ≠ 0`.
pub fn check_method(method: Method, alpha: f64) -> Result<(), CliError> {
    if method.requires_skew() && alpha != 0.0 {
        return Err(CliError::Usage(format!(
            "{method} solves skew systems only; use --alpha 0 (got {alpha})"
        )));
    }
    if method.requires_shift() && alpha == 0.0 {
        return Err(CliError::Usage(format!(
            "{method} needs a shifted operator A = αI + S with α ≠ 0; pass a nonzero --alpha"
        )));
    }
    Ok(())
}

pub fn run_method(
    method: Method,
    op: &LinearOperator,
    b: &Vector,
    cfg: &SolverConfig,
) -> skew_krylov::Result<ConvergenceHistory> {
    match method {
        Method::S2cg => s2cg_solve(op, b, cfg),
        Method::S2mr => s2mr_solve(op, b, cfg),
        Method::Craig => craig_solve(op, b, cfg),
        Method::Lsqr => lsqr_solve(op, b, cfg),
        Method::S3cg => s3cg_solve(op, b, cfg),
        Method::S3mr => s3mr_solve(op, b, cfg),
        Method::S3lq => s3lq_solve(op, b, cfg, false),
        Method::Usymlq => usymlq_solve(op, b, b, cfg),
        Method::Usymqr => usymqr_solve(op, b, b, cfg),
    }
}

fn summary(h: &ConvergenceHistory) -> String {
    let last = h.records.last();
    let mut s = format!("{}: {}", h.method, h.outcome.describe());
    if let Some(r) = last {
        s.push_str(&format!(", iter {} residual {:e}", r.iter, r.residual_norm));
        if let Some(e) = r.error_norm {
            s.push_str(&format!(" error {e:e}"));
        }
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn solve(args: &SolveArgs) -> Result<Status, CliError> {
    let p = problem::build(&args.problem)?;
    check_method(args.solver, p.alpha)?;
    let reference = match (&args.reference, args.no_reference) {
        (Some(path), _) => Some(read_vector(path)?),
        (None, true) => None,
        (None, false) => problem::oracle_reference(&p)?,
    };
    let cfg = SolverConfig {
        tol: args.tol,
        max_iters: args.maxit,
        breakdown_tol: args.breakdown_tol,
        reorthogonalize: args.reorthogonalize,
        seed: args.problem.seed,
        reference,
        ..SolverConfig::default()
    };
    if let Err(e) = cfg.validate() {
        return Err(CliError::Usage(e.to_string()));
    }
    let h = run_method(args.solver, &p.op, &p.b, &cfg)?;
    let comments = vec![
        format!("solver={}", args.solver),
        p.description.clone(),
        format!("seed={}", args.problem.seed),
        format!("outcome={}", h.outcome.describe()),
    ];
    let csv = h.to_csv(&comments, args.timing);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    eprintln!("{}", summary(&h));
    Ok(status_of(&h.outcome))
}

fn status_of(outcome: &Outcome) -> Status {
    if outcome.is_success() {
        Status::Success
    } else {
        eprintln!("outcome: {}", outcome.describe());
        Status::Failure
    }
}

pub fn experiment(args: &ExperimentArgs) -> Result<Status, CliError> {
    fs::create_dir_all(&args.out_dir).map_err(|source| CliError::Io {
        path: args.out_dir.clone(),
        source,
    })?;
    let tag = match args.name {
        ExperimentName::Fig1 => "fig1",
        ExperimentName::Fig2 => "fig2",
        ExperimentName::Fig3 => "fig3",
    };
    let (op, b, methods, description, reference) = match args.name {
        ExperimentName::Fig1 | ExperimentName::Fig2 => {
            let kind = if args.name == ExperimentName::Fig1 {
                RhsKind::Consistent
            } else {
                RhsKind::Inconsistent
            };
            let op = tridiag_skew(49, 1.0);
            let b = example_rhs(kind, 49)?;
            let methods: &[Method] = if args.name == ExperimentName::Fig1 {
                &[Method::S2cg, Method::Craig, Method::S2mr, Method::Lsqr]
            } else {
                &[Method::S2mr, Method::Lsqr]
            };
            let x = oracle::dense_pseudoinverse_solution(&op.to_dense(), &b)?;
            let d = format!("gen=tridiag m=49 sigma=1 alpha=0 rhs={kind:?}").to_lowercase();
            (op, b, methods, d, x)
        }
        ExperimentName::Fig3 => {
            let op = LinearOperator::shifted(0.8, conv2d_skew(15, 0.4, 0.6))?;
            let b = random_rhs(op.n(), args.seed);
            let x = oracle::dense_solve(&op.to_dense(), &b)?;
            let methods: &[Method] = &[
                Method::S3lq,
                Method::S3cg,
                Method::Craig,
                Method::S3mr,
                Method::Lsqr,
            ];
            let d = format!(
                "gen=conv2d m=15 sigma1=0.4 sigma2=0.6 alpha=0.8 rhs=random seed={}",
                args.seed
            );
            (op, b, methods, d, x)
        }
    };
    let cfg = SolverConfig {
        seed: args.seed,
        reference: Some(reference),
        ..SolverConfig::default()
    };
    let mut status = Status::Success;
    for &m in methods {
        let h = run_method(m, &op, &b, &cfg)?;
        let comments = vec![
            format!("experiment={tag} solver={m}"),
            description.clone(),
            format!("seed={}", args.seed),
            format!("outcome={}", h.outcome.describe()),
        ];
        let path = args.out_dir.join(format!("{tag}_{m}.csv"));
        write_file(&path, &h.to_csv(&comments, args.timing))?;
        println!("{} -> {}", summary(&h), path.display());
        if !h.outcome.is_success() {
            status = Status::Failure;
        }
    }
    if args.name == ExperimentName::Fig3 {
        let cg_craig = check_solver_equivalence(SolverCheck::S3cgCraig, &op, &b, &cfg)?;
        let lq_cg = check_solver_equivalence(SolverCheck::S3lqS3cg, &op, &b, &cfg)?;
        let mut csv = format!(
            "# experiment=fig3 paired iterates\n# {description}\n# seed={}\n",
            args.seed
        );
        csv.push_str("k,s3cg_2k_vs_craig_k,s3lq_2k_2k1_vs_s3cg_2k\n");
        for r in &cg_craig.rows {
            let other = lq_cg
                .rows
                .iter()
                .find(|q| q.index == 2 * r.index)
                .map(|q| format!("{:e}", q.deviation))
                .unwrap_or_default();
            csv.push_str(&format!("{},{:e},{}\n", r.index, r.deviation, other));
        }
        let path = args.out_dir.join("fig3_pairs.csv");
        write_file(&path, &csv)?;
        let worst = cg_craig.max_deviation().max(lq_cg.max_deviation());
        println!(
            "fig3 paired iterates: max deviation {worst:e} -> {}",
            path.display()
        );
        if !(cg_craig.passes(1e-10) && lq_cg.passes(1e-10)) {
            status = Status::Failure;
        }
    }
    Ok(status)
}

pub fn equiv(args: &EquivArgs) -> Result<Status, CliError> {
    let p = problem::build(&args.problem)?;
    let opts = ProcessOptions {
        reorthogonalize: args.reorthogonalize,
        ..ProcessOptions::default()
    };
    let skew_only = matches!(
        args.check,
        CheckName::GkLanczos | CheckName::SsyLanczos | CheckName::Parity
    );
    let solver_check = solver_check(args.check);
    let needs_skew = skew_only || solver_check.is_some_and(|c| c.requires_skew());
    let name = args
        .check
        .to_possible_value()
        .map_or_else(String::new, |v| v.get_name().to_string());
    if needs_skew && (p.alpha != 0.0 || !p.op.is_skew()) {
        return Err(CliError::Usage(format!(
            "check {name} needs a skew operator (--alpha 0 with skew S)"
        )));
    }
    if !needs_skew && p.alpha == 0.0 {
        return Err(CliError::Usage(format!(
            "check {name} needs a shifted operator; pass a nonzero --alpha"
        )));
    }
    let report = match args.check {
        CheckName::GkLanczos => {
            check_gk_lanczos_equivalence(&p.op, &p.b, args.steps.unwrap_or(20), opts)?
        }
        CheckName::SsyLanczos => {
            check_ssy_lanczos_equivalence(&p.op, &p.b, args.steps.unwrap_or(24), opts)?
        }
        CheckName::AppendixGk => {
            gk_shifted_properties_check(&p.op, &p.b, args.steps.unwrap_or(p.op.n()))?
        }
        CheckName::Parity => parity_report(&p)?,
        _ => {
            let cfg = SolverConfig {
                tol: args.tol,
                reorthogonalize: args.reorthogonalize,
                ..SolverConfig::default()
            };
            let check = solver_check.expect("solver check");
            check_solver_equivalence(check, &p.op, &p.b, &cfg)?
        }
    };
    print!("# {}\n{}", p.description, report.render(args.threshold));
    Ok(if report.passes(args.threshold) {
        Status::Success
    } else {
        Status::Failure
    })
}

fn solver_check(c: CheckName) -> Option<SolverCheck> {
    Some(match c {
        CheckName::S2cgCraig => SolverCheck::S2cgCraig,
        CheckName::S2mrLsqr => SolverCheck::S2mrLsqr,
        CheckName::S3cgCraig => SolverCheck::S3cgCraig,
        CheckName::S3lqS3cg => SolverCheck::S3lqS3cg,
        CheckName::S3mrUsymqr => SolverCheck::S3mrUsymqr,
        CheckName::S3lqUsymlq => SolverCheck::S3lqUsymlq,
        _ => return None,
    })
}

fn parity_report(p: &Problem) -> Result<DeviationReport, CliError> {
    let r = termination_parity(&p.op, &p.b)?;
    let mut report = DeviationReport::new("parity");
    let class = match r.parity {
        Parity::EvenInRange => "even_in_range",
        Parity::OddNotInRange => "odd_not_in_range",
    };
    report.note(format!("ℓ = {} → {class}", r.ell));
    report.note(format!(
        "dense oracle: consistent = {} (range residual {:e})",
        r.oracle_consistent, r.range_residual
    ));
    if !r.agrees {
        report.fail("parity disagrees with the dense consistency decision".into());
    }
    if !r.even_blocks_nonsingular {
        report.fail("a leading even block H₂ⱼ is singular".into());
    }
    Ok(report)
}
