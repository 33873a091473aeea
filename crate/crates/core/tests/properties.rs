use nalgebra::DMatrix;
use proptest::prelude::*;

use skew_krylov::factorizations::{
    check_ssy_lanczos_equivalence, lanczos_recurrence_residual, termination_parity, GolubKahan,
    Lanczos, ProcessOptions, Ssy, TerminationSide,
};
use skew_krylov::operators::{conv2d_skew, random_singular_skew, random_skew, tridiag_skew};
use skew_krylov::oracle::{
    dense_pseudoinverse_solution, dense_skew_spectral_radius, dense_solve,
    explicit_krylov_galerkin, explicit_krylov_minres, explicit_minlen_galerkin, is_consistent,
    moore_penrose_residuals, normal_equations_minres, null_space_basis, pseudo_inverse,
};
use skew_krylov::rng::SplitMix64;
use skew_krylov::shifted_solvers::{
    error_bound, s3cg_solve, s3lq_solve, s3lq_solve_with_diagnostics, s3mr_solve, BoundKind, S3cg,
};
use skew_krylov::skew_solvers::{lsqr_solve, s2mr_solve};
use skew_krylov::vector::norm;
use skew_krylov::{LinearOperator, SolverConfig, Vector};

fn config() -> ProptestConfig {
    let mut c = ProptestConfig::default();
    if std::env::var_os("PROPTEST_CASES").is_none() {
        c.cases = 24;
    }
    c
}

/// Random skew operator of one of three shapes.
fn skew_operator(rng: &mut SplitMix64, n: usize) -> LinearOperator {
    match rng.range(0, 2) {
        0 => random_skew(n, rng),
        1 => tridiag_skew(n, rng.uniform_in(0.2, 2.0)),
        _ => {
            let m = (n as f64).sqrt().ceil() as usize;
            conv2d_skew(m, rng.uniform_in(0.1, 1.0), rng.uniform_in(0.1, 1.0))
        }
    }
}

fn shifted_system(seed: u64, n: usize) -> (LinearOperator, Vector, f64) {
    let mut rng = SplitMix64::new(seed);
    let s = random_skew(n, &mut rng);
    let mut alpha = rng.uniform_in(0.4, 1.5);
    if rng.uniform() < 0.3 {
        alpha = -alpha;
    }
    let b = rng.vector(n);
    (LinearOperator::shifted(alpha, s).unwrap(), b, alpha)
}

/// `P [K 0; 0 0] Pᵀ` with a random permutation `P` and `K = Q diag(σ₁J, …) Qᵀ`,
/// `J = [[0, 1], [−1, 0]]`, separated `σ ∈ [0.5, 2]`, random orthogonal `Q`.
/// The null space is exact, so zero steps are resolvable at the breakdown
/// threshold.
fn conditioned_singular_skew(n: usize, rank: usize, rng: &mut SplitMix64) -> LinearOperator {
    let q = DMatrix::from_fn(rank, rank, |_, _| rng.symmetric())
        .qr()
        .q();
    let mut d = DMatrix::zeros(rank, rank);
    let pairs = rank / 2;
    for i in (0..rank).step_by(2) {
        // One σ per equal-width slot of [0.5, 2], kept off the slot edges.
        let sigma = 0.5 + 1.5 * ((i / 2) as f64 + rng.uniform_in(0.25, 0.75)) / pairs as f64;
        d[(i, i + 1)] = sigma;
        d[(i + 1, i)] = -sigma;
    }
    let k = &q * d * q.transpose();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.range(0, i));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..rank {
        for j in 0..rank {
            m[(perm[i], perm[j])] = 0.5 * (k[(i, j)] - k[(j, i)]);
        }
    }
    LinearOperator::from_dense(m)
        .unwrap()
        .into_skew(0.0)
        .unwrap()
}

/// Singular skew system; `b` in the range when `consistent`.
fn singular_system(seed: u64, n: usize, consistent: bool) -> (LinearOperator, Vector) {
    let mut rng = SplitMix64::new(seed);
    let rank = 2 * rng.range(1, (n - 1) / 2);
    let s = conditioned_singular_skew(n, rank, &mut rng);
    let b = if consistent {
        s.apply(&rng.vector(n)).unwrap()
    } else {
        rng.vector(n)
    };
    (s, b)
}

fn rel(x: &Vector, y: &Vector) -> f64 {
    norm(&(x - y)) / norm(y)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn skew_bilinear_form_vanishes(seed in any::<u64>(), n in 2usize..40) {
        let mut rng = SplitMix64::new(seed);
        let s = skew_operator(&mut rng, n);
        let fro = s.frobenius_norm();
        for _ in 0..10 {
            let x = rng.vector(s.n());
            let y = rng.vector(s.n());
            let v = y.dot(&s.apply(&x).unwrap()) + x.dot(&s.apply(&y).unwrap());
            prop_assert!(v.abs() <= 1e-12 * norm(&x) * norm(&y) * fro);
        }
    }

    #[test]
    fn shift_is_applied_on_top_of_skew(seed in any::<u64>(), n in 1usize..40, alpha in -3.0f64..3.0) {
        prop_assume!(alpha != 0.0);
        let mut rng = SplitMix64::new(seed);
        let s = skew_operator(&mut rng, n);
        let a = LinearOperator::shifted(alpha, s.clone()).unwrap();
        let x = rng.vector(s.n());
        let sx = s.apply(&x).unwrap();
        let ax = a.apply(&x).unwrap();
        let atx = a.apply_transpose(&x).unwrap();
        for i in 0..s.n() {
            prop_assert_eq!(ax[i], sx[i] + alpha * x[i]);
            prop_assert_eq!(atx[i], alpha * x[i] - sx[i]);
        }
    }

    #[test]
    fn lanczos_recurrence_holds(seed in any::<u64>(), n in 2usize..60) {
        let mut rng = SplitMix64::new(seed);
        let s = skew_operator(&mut rng, n);
        let b = rng.vector(s.n());
        let mut lz = Lanczos::new(&s, &b, ProcessOptions::stored()).unwrap();
        lz.run(s.n().min(50)).unwrap();
        let k = lz.grade().unwrap_or(lz.k()).max(1);
        let r = lanczos_recurrence_residual(&lz).unwrap();
        prop_assert!(r <= 1e-12 * s.frobenius_norm() * (k as f64).sqrt(), "residual {r:e}");
        let last = lz.grade().unwrap_or(lz.gammas().len());
        prop_assert!(lz.gammas()[..last].iter().all(|&g| g > 0.0));
    }

    #[test]
    fn parity_matches_consistency(seed in any::<u64>(), n in 4usize..40, consistent in any::<bool>()) {
        let (s, b) = singular_system(seed, n, consistent);
        let r = termination_parity(&s, &b).unwrap();
        prop_assert!(r.agrees, "ell {} oracle {} range residual {:e}", r.ell, r.oracle_consistent, r.range_residual);
        prop_assert!(r.even_blocks_nonsingular);
        prop_assert_eq!(r.oracle_consistent, consistent);
    }

    #[test]
    fn golub_kahan_side_matches_consistency(seed in any::<u64>(), n in 4usize..40, consistent in any::<bool>()) {
        let (s, b) = singular_system(seed, n, consistent);
        let mut gk = GolubKahan::new(&s, &b, ProcessOptions::reorthogonalized()).unwrap();
        gk.run(n + 1).unwrap();
        let side = gk.termination().map(|t| t.1);
        let expected = if is_consistent(&s.to_dense(), &b).unwrap() {
            TerminationSide::BetaZero
        } else {
            TerminationSide::AlphaZero
        };
        prop_assert_eq!(side, Some(expected));
    }

    #[test]
    fn golub_kahan_recurrence_holds(seed in any::<u64>(), n in 2usize..50) {
        let (a, b, _) = shifted_system(seed, n);
        let mut gk = GolubKahan::new(&a, &b, ProcessOptions::stored()).unwrap();
        gk.run(n.min(30)).unwrap();
        let j = gk.alphas().len().min(gk.betas().len() - 1);
        let u = gk.u_matrix().unwrap();
        let v = gk.v_matrix().unwrap();
        let rows = u.ncols().min(j + 1);
        let b_rect = gk.b_rect(j);
        let lhs = a.to_dense() * v.columns(0, j);
        let rhs = u.columns(0, rows) * b_rect.view((0, 0), (rows, j));
        let r = (lhs - rhs).norm();
        prop_assert!(r <= 1e-12 * a.frobenius_norm() * (j as f64).sqrt(), "residual {r:e}");
    }

    #[test]
    fn ssy_reproduces_lanczos_on_skew(seed in any::<u64>(), n in 4usize..40) {
        let mut rng = SplitMix64::new(seed);
        let s = skew_operator(&mut rng, n);
        let b = rng.vector(s.n());
        // The two coefficient sequences drift apart geometrically in floating
        // point; compare over the first half of the Krylov dimension.
        let steps = (s.n() / 2).clamp(2, 24);
        let mut ssy = Ssy::new(&s, &b, &b, ProcessOptions::default()).unwrap();
        ssy.run(steps).unwrap();
        prop_assert!(ssy.thetas().iter().all(|t| t.abs() <= 1e-12));
        let report = check_ssy_lanczos_equivalence(&s, &b, steps, ProcessOptions::default()).unwrap();
        prop_assert!(report.failures.is_empty(), "{}", report.render(1e-12));
        for name in ["alpha", "beta", "theta"] {
            let d = report.component_value(name).unwrap_or(0.0);
            prop_assert!(d <= 1e-12, "{name}: {d:e}");
        }
    }

    #[test]
    fn s2mr_pairs_and_monotone_residuals(seed in any::<u64>(), n in 4usize..50, consistent in any::<bool>()) {
        let (s, b) = singular_system(seed, n, consistent);
        let h = s2mr_solve(&s, &b, &SolverConfig::default()).unwrap();
        let mut prev = f64::INFINITY;
        for r in &h.records {
            prop_assert!(r.estimate_norm <= prev * (1.0 + 1e-12));
            prev = r.estimate_norm;
            if r.iter % 2 == 1 {
                if let Some(q) = h.record(r.iter - 1).filter(|q| q.iter >= 2) {
                    prop_assert!((q.estimate_norm - r.estimate_norm).abs() <= 1e-12 * q.estimate_norm);
                }
            }
        }
    }

    #[test]
    fn singular_solutions_avoid_null_space(seed in any::<u64>(), n in 4usize..40, consistent in any::<bool>()) {
        let (s, b) = singular_system(seed, n, consistent);
        let nsp = null_space_basis(&s.to_dense()).unwrap();
        // Plain recurrences leave γ_{ℓ+1} near 1e-13‖b‖, too close to the
        // breakdown threshold for termination to be seen reliably.
        let cfg = SolverConfig { reorthogonalize: true, ..SolverConfig::default() };
        for h in [s2mr_solve(&s, &b, &cfg).unwrap(), lsqr_solve(&s, &b, &cfg).unwrap()] {
            prop_assert!(h.outcome.is_success(), "{}", h.outcome.describe());
            let p = nsp.transpose() * &h.solution;
            prop_assert!(p.norm() <= 1e-8, "{}: ‖Nᵀx‖ = {:e}", h.method, p.norm());
        }
        let xp = dense_pseudoinverse_solution(&s.to_dense(), &b).unwrap();
        prop_assert!((nsp.transpose() * xp).norm() <= 1e-10);
    }

    #[test]
    fn s3mr_estimate_tracks_true_residual(seed in any::<u64>(), n in 2usize..60) {
        let (a, b, _) = shifted_system(seed, n);
        let h = s3mr_solve(&a, &b, &SolverConfig::default()).unwrap();
        let floor = 1e-6 * norm(&b);
        let mut prev = f64::INFINITY;
        for r in &h.records {
            let d = (r.estimate_norm - r.residual_norm).abs() / r.residual_norm.max(floor);
            prop_assert!(d <= 1e-8, "k={} deviation {d:e}", r.iter);
            prop_assert!(r.estimate_norm < prev);
            prev = r.estimate_norm;
        }
    }

    #[test]
    fn s3cg_directions_are_semi_conjugate(seed in any::<u64>(), n in 4usize..40) {
        let (a, b, _) = shifted_system(seed, n);
        let mut cg = S3cg::new(&a, &b).unwrap();
        let mut dirs: Vec<(Vector, Vector)> = Vec::new();
        // Late directions shrink toward rounding level, where relative
        // conjugacy is no longer resolvable.
        let tol = 1e-6 * norm(&b);
        for _ in 0..15.min(n) {
            let p = cg.direction().clone();
            let ap = a.apply(&p).unwrap();
            dirs.push((p, ap));
            if cg.step().unwrap() <= tol {
                break;
            }
        }
        for k in 1..dirs.len() {
            for i in 0..k {
                let (pi, _) = &dirs[i];
                let (_, apk) = &dirs[k];
                let v = pi.dot(apk).abs();
                prop_assert!(v <= 1e-10 * norm(pi) * norm(apk), "i={i} k={k}: {v:e}");
            }
        }
    }

    #[test]
    fn shifted_krylov_orthogonality(seed in any::<u64>(), n in 4usize..40) {
        let (a, b, _) = shifted_system(seed, n);
        let s = a.skew_part().unwrap();
        let x = dense_solve(&a.to_dense(), &b).unwrap();
        let s2 = |v: &Vector| s.apply(&s.apply(v).unwrap()).unwrap();
        let mut left = Vec::new();
        let mut right = Vec::new();
        let (mut p, mut q) = (b.clone(), s.apply(&b).unwrap());
        for _ in 0..=5 {
            left.push(a.apply_transpose(&p).unwrap());
            right.push(a.apply_transpose(&q).unwrap());
            p = s2(&p);
            q = s2(&q);
        }
        for r in &right {
            for l in &left {
                prop_assert!(l.dot(r).abs() <= 1e-10 * norm(l) * norm(r));
            }
            prop_assert!(x.dot(r).abs() <= 1e-10 * norm(&x) * norm(r));
        }
    }

    #[test]
    fn s3lq_invariants(seed in any::<u64>(), n in 2usize..60) {
        let (a, b, _) = shifted_system(seed, n);
        let cfg = SolverConfig::default().with_iterates();
        let (h, diag) = s3lq_solve_with_diagnostics(&a, &b, &cfg, false).unwrap();
        prop_assert!(diag.max_lambda_ratio <= 1e-12, "λ ratio {:e}", diag.max_lambda_ratio);
        prop_assert!(diag.max_rotation_defect <= 1e-14);
        let mut prev = 0.0;
        for r in &h.records {
            let x = r.iterate.as_ref().unwrap();
            prop_assert!(norm(x) >= prev * (1.0 - 1e-10), "k={}: {prev:e} -> {:e}", r.iter, norm(x));
            prev = norm(x);
            if r.iter % 2 == 0 && r.iter >= 2 {
                if let Some(y) = h.iterate(r.iter + 1) {
                    prop_assert!(norm(&(x - y)) <= 1e-10 * norm(x).max(1.0));
                }
            }
        }
    }

    #[test]
    fn convergence_bounds_hold(seed in any::<u64>(), n in 4usize..50) {
        let (a, b, alpha) = shifted_system(seed, n);
        let beta = dense_skew_spectral_radius(&a.skew_part().unwrap().to_dense()).unwrap();
        let x = dense_solve(&a.to_dense(), &b).unwrap();
        let cfg = SolverConfig::default().with_iterates();
        for r in s3cg_solve(&a, &b, &cfg).unwrap().records.iter().filter(|r| r.iter % 2 == 0) {
            let e = rel(r.iterate.as_ref().unwrap(), &x);
            prop_assert!(e <= error_bound(alpha, beta, (r.iter / 2) as u32, BoundKind::Cg));
        }
        for r in &s3mr_solve(&a, &b, &cfg).unwrap().records {
            let e = r.residual_norm / norm(&b);
            prop_assert!(e <= error_bound(alpha, beta, r.iter as u32, BoundKind::Mr));
        }
    }

    #[test]
    fn short_recurrences_match_explicit_bases(seed in any::<u64>(), n in 4usize..30) {
        let (a, b, _) = shifted_system(seed, n);
        let dense = a.to_dense();
        let cfg = SolverConfig {
            max_iters: Some(12),
            ..SolverConfig::default().with_iterates()
        };
        let checks = [
            (s3cg_solve(&a, &b, &cfg).unwrap(), 0),
            (s3mr_solve(&a, &b, &cfg).unwrap(), 1),
            (s3lq_solve(&a, &b, &cfg, false).unwrap(), 2),
        ];
        for (h, kind) in &checks {
            for r in h.records.iter().filter(|r| r.iter <= 12.min(n - 1)) {
                let y = match kind {
                    0 => explicit_krylov_galerkin(&dense, &b, r.iter).unwrap(),
                    1 => explicit_krylov_minres(&dense, &b, r.iter).unwrap().x,
                    _ => explicit_minlen_galerkin(&dense, &b, r.iter).unwrap(),
                };
                let d = norm(&(r.iterate.as_ref().unwrap() - &y)) / norm(&y).max(1e-6);
                prop_assert!(d <= 1e-9, "{} k={}: {d:e}", h.method, r.iter);
            }
        }
    }

    #[test]
    fn oracle_formulations_agree(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = SplitMix64::new(seed);
        let a = DMatrix::from_fn(20, 20, |_, _| rng.symmetric()) + DMatrix::identity(20, 20) * 4.0;
        let b = rng.vector(20);
        let x1 = explicit_krylov_minres(&a, &b, k).unwrap().x;
        let x2 = normal_equations_minres(&a, &b, k).unwrap();
        prop_assert!(norm(&(&x1 - &x2)) <= 1e-8 * norm(&x1));
    }

    #[test]
    fn pseudo_inverse_satisfies_penrose(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = SplitMix64::new(seed);
        let rank = 2 * rng.range(0, n / 2);
        let s = random_singular_skew(n, rank, &mut rng).to_dense();
        let p = pseudo_inverse(&s).unwrap();
        for r in moore_penrose_residuals(&s, &p) {
            prop_assert!(r <= 1e-10, "{r:e}");
        }
    }
}
