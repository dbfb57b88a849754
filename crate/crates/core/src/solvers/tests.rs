use super::*;
use crate::grassmann::make_point;
use crate::sampling;
use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn diag(values: &[f64]) -> SymmetricPSDMatrix {
    SymmetricPSDMatrix::new(DMatrix::from_diagonal(&DVector::from_row_slice(values))).unwrap()
}

fn col(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(v.len(), 1, v)
}

fn sphere_point(t: f64) -> GrassmannPoint {
    make_point(&col(&[t.cos(), t.sin(), 0.0])).unwrap()
}

#[test]
fn rsd_step_fixes_the_minimizer() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let next = rsd_step(&a, &s.leading_block, 0.25).unwrap();
    assert!(distance(&next, &s.leading_block).unwrap() < 1e-12);
}

#[test]
fn rsd_step_with_zero_step_is_identity() {
    let mut r = rng(3);
    let a = sampling::psd_with_spectrum(&[4.0, 2.0, 1.0, 0.5], true, &mut r).unwrap();
    let x = sampling::random_point(4, 2, &mut r);
    let next = rsd_step(&a, &x, 0.0).unwrap();
    assert!(distance(&next, &x).unwrap() < 1e-12);
}

#[test]
fn rsd_step_matches_the_sphere_geodesic_oracle() {
    // On the sphere case the step moves the angle by exactly eta sin(2t);
    // the oracle is the explicit 3-vector geodesic.
    let a = diag(&[3.0, 2.0, 1.0]);
    let (t, eta) = (0.7f64, 0.1f64);
    let next = rsd_step(&a, &sphere_point(t), eta).unwrap();
    let oracle = sphere_point(t - eta * (2.0 * t).sin());
    assert!(distance(&next, &oracle).unwrap() < 1e-10);
}

#[test]
fn rsd_step_rejects_negative_step() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let x = sphere_point(0.4);
    assert!(matches!(
        rsd_step(&a, &x, -0.1),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn compute_step_closed_forms() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    // gamma = 4, a(V_alpha) = 1.
    let adaptive = compute_step(&s, &StepRule::AdaptiveAOverGamma, &s.leading_block, 0.0).unwrap();
    assert_relative_eq!(adaptive, 0.25, epsilon = 1e-14);
    let cos_rule = compute_step(
        &s,
        &StepRule::CosD0OverGamma,
        &s.leading_block,
        std::f64::consts::FRAC_PI_4,
    )
    .unwrap();
    assert_relative_eq!(cos_rule, std::f64::consts::FRAC_PI_4.cos() / 4.0, epsilon = 1e-14);
    let fixed = compute_step(&s, &StepRule::FixedOneOverGamma, &s.leading_block, 0.0).unwrap();
    assert_relative_eq!(fixed, 0.25, epsilon = 1e-14);
    let eta = compute_step(&s, &StepRule::FixedEta(0.05), &s.leading_block, 0.0).unwrap();
    assert_relative_eq!(eta, 0.05);
}

#[test]
fn compute_step_rejects_degenerate_spectrum() {
    let a = SymmetricPSDMatrix::new(DMatrix::identity(3, 3)).unwrap();
    let s = spectral_data(&a, 1).unwrap();
    let x = sphere_point(0.3);
    assert!(matches!(
        compute_step(&s, &StepRule::FixedOneOverGamma, &x, 0.0),
        Err(Error::DegenerateSpectrum { .. })
    ));
}

#[test]
fn compute_step_rejects_boundary_angle_for_adaptive() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let x = make_point(&col(&[0.0, 1.0, 0.0])).unwrap();
    assert!(matches!(
        compute_step(&s, &StepRule::AdaptiveAOverGamma, &x, 0.0),
        Err(Error::AngleAtBoundary { .. })
    ));
}

#[test]
fn solve_from_the_minimizer_stops_immediately() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let cfg = SolverConfig::new(StepRule::AdaptiveAOverGamma);
    let trace = solve_rsd(&a, 1, &s.leading_block, &cfg).unwrap();
    assert_eq!(trace.len(), 1);
    assert_eq!(trace.iterations(), 0);
}

#[test]
fn solve_rejects_initialization_outside_pi_half() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let x0 = make_point(&col(&[0.0, 1.0, 0.0])).unwrap();
    for rule in [StepRule::AdaptiveAOverGamma, StepRule::CosD0OverGamma] {
        let cfg = SolverConfig::new(rule);
        assert!(matches!(
            solve_rsd(&a, 1, &x0, &cfg),
            Err(Error::HypothesisViolated(_))
        ));
    }
}

#[test]
fn solve_satisfies_the_linear_rate_bound() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let x0 = sphere_point(0.7);
    let mut cfg = SolverConfig::new(StepRule::CosD0OverGamma);
    cfg.dist_tol = 1e-9;
    cfg.fval_tol = 1e-30;
    let trace = solve_rsd(&a, 1, &x0, &cfg).unwrap();
    // The gap floors at rounding level (~1e-16) around dist ~ 1e-8, so the
    // run stops a little above dist_tol.
    assert!(trace.dist.last().unwrap() <= &1e-7);
    let lb = trace.linear_bound.as_ref().unwrap();
    for t in 0..trace.len() {
        assert!(
            trace.dist[t] * trace.dist[t] <= lb[t] + 1e-9,
            "linear bound violated at t={t}"
        );
    }
    // Distance is non-increasing under the cosine rule.
    for w in trace.dist.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn solve_satisfies_the_adaptive_contraction_per_step() {
    let mut r = rng(17);
    let spectrum = sampling::random_spectrum_with_gap(6, 2, 0.8, &mut r);
    let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
    let s = spectral_data(&a, 2).unwrap();
    let x0 = sampling::point_at_distance(&s.leading_block, 1.2, &mut r).unwrap();
    let mut cfg = SolverConfig::new(StepRule::AdaptiveAOverGamma);
    cfg.max_iters = 400;
    let trace = solve_rsd(&a, 2, &x0, &cfg).unwrap();
    let report = verify_contraction(&trace, &s, &cfg).unwrap();
    assert!(report.pass, "contraction report failed");
    for w in trace.dist.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
}

#[test]
fn solve_gap_free_bound_for_one_over_gamma_rule() {
    // delta = 0 at k = 1; the appendix bound applies from within pi/4.
    let a = diag(&[2.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let mut r = rng(23);
    let x0 = sampling::point_at_distance(&s.leading_block, 0.7, &mut r).unwrap();
    let mut cfg = SolverConfig::new(StepRule::FixedOneOverGamma);
    cfg.max_iters = 300;
    cfg.fval_tol = 1e-15;
    let trace = solve_rsd(&a, 1, &x0, &cfg).unwrap();
    let sb = trace.sublinear_bound.as_ref().expect("appendix bound recorded");
    for t in 0..trace.len() {
        assert!(
            trace.gap[t] <= sb[t] + 1e-9,
            "gap-free bound violated at t={t}: {} > {}",
            trace.gap[t],
            sb[t]
        );
    }
    // f is non-increasing under the 1/gamma rule.
    for w in trace.f.windows(2) {
        assert!(w[1] <= w[0] + 1e-12);
    }
    let report = verify_contraction(&trace, &s, &cfg).unwrap();
    assert!(report.pass);
}

#[test]
fn solve_is_deterministic_for_fixed_seed() {
    let mut r = rng(29);
    let spectrum = sampling::random_spectrum_with_gap(6, 2, 0.5, &mut r);
    let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
    let s = spectral_data(&a, 2).unwrap();
    let x0 = sampling::point_at_distance(&s.leading_block, 1.0, &mut r).unwrap();
    let mut cfg = SolverConfig::new(StepRule::CosD0OverGamma);
    cfg.noise_sigma = 1e-3;
    cfg.max_iters = 50;
    cfg.seed = 42;
    let t1 = solve_rsd(&a, 2, &x0, &cfg).unwrap();
    let t2 = solve_rsd(&a, 2, &x0, &cfg).unwrap();
    assert_eq!(t1.f, t2.f);
    assert_eq!(t1.dist, t2.dist);
    assert_eq!(t1.gap, t2.gap);
    assert_eq!(t1.grad_norm_f, t2.grad_norm_f);
}

#[test]
fn noisy_gradients_change_the_path_but_not_the_monitors() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let x0 = sphere_point(0.6);
    let mut cfg = SolverConfig::new(StepRule::CosD0OverGamma);
    cfg.noise_sigma = 1e-2;
    cfg.max_iters = 30;
    cfg.seed = 7;
    let noisy = solve_rsd(&a, 1, &x0, &cfg).unwrap();
    cfg.noise_sigma = 0.0;
    let exact = solve_rsd(&a, 1, &x0, &cfg).unwrap();
    assert_eq!(noisy.f[0], exact.f[0]);
    assert!(noisy.f.len() > 1);
    // Paths diverge but stay on the manifold with valid monitor rows.
    assert!(noisy.gap.iter().all(|g| *g >= 0.0));
    assert!(noisy.dist.iter().all(|d| *d >= 0.0));
}

#[test]
fn subspace_iteration_fixes_invariant_subspaces() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let cfg = SolverConfig::new(StepRule::FixedOneOverGamma);
    let trace = subspace_iteration(&a, 1, &s.leading_block, &cfg).unwrap();
    assert_eq!(trace.len(), 1);
}

#[test]
fn subspace_iteration_follows_the_tangent_recursion() {
    // Power-method angle recursion: tan(theta_{t+1}) = (lambda_2/lambda_1)
    // tan(theta_t) for k = 1 with the iterate in the top-2 eigenplane.
    let a = diag(&[3.0, 2.0, 1.0]);
    let x0 = sphere_point(1.1);
    let mut cfg = SolverConfig::new(StepRule::FixedOneOverGamma);
    cfg.max_iters = 25;
    cfg.dist_tol = 1e-14;
    cfg.fval_tol = 1e-30;
    let trace = subspace_iteration(&a, 1, &x0, &cfg).unwrap();
    assert!(trace.len() > 10);
    for w in trace.theta_max.windows(2) {
        assert!(
            (w[1].tan() - (2.0 / 3.0) * w[0].tan()).abs() < 1e-10,
            "tan recursion violated: {} -> {}",
            w[0],
            w[1]
        );
    }
}

#[test]
fn subspace_iteration_converges_on_random_gapped_problems() {
    let mut r = rng(31);
    for _ in 0..5 {
        let spectrum = sampling::random_spectrum_with_gap(6, 2, 1.0, &mut r);
        let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
        let s = spectral_data(&a, 2).unwrap();
        let x0 = sampling::point_at_distance(&s.leading_block, 1.2, &mut r).unwrap();
        let mut cfg = SolverConfig::new(StepRule::FixedOneOverGamma);
        cfg.max_iters = 2000;
        cfg.dist_tol = 1e-8;
        cfg.fval_tol = 1e-30;
        let trace = subspace_iteration(&a, 2, &x0, &cfg).unwrap();
        assert!(
            *trace.theta_max.last().unwrap() < 1e-7,
            "subspace iteration did not converge"
        );
    }
}

#[test]
fn verify_contraction_requires_bounds() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let x0 = sphere_point(0.5);
    let mut cfg = SolverConfig::new(StepRule::CosD0OverGamma);
    cfg.record_bounds = false;
    cfg.max_iters = 10;
    let trace = solve_rsd(&a, 1, &x0, &cfg).unwrap();
    assert!(matches!(
        verify_contraction(&trace, &s, &cfg),
        Err(Error::MissingBounds)
    ));
}

#[test]
fn verify_contraction_checks_the_distance_cap() {
    let mut r = rng(37);
    let spectrum = sampling::random_spectrum_with_gap(7, 2, 0.6, &mut r);
    let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
    let s = spectral_data(&a, 2).unwrap();
    let x0 = sampling::point_at_distance(&s.leading_block, std::f64::consts::FRAC_PI_4, &mut r)
        .unwrap();
    let mut cfg = SolverConfig::new(StepRule::FixedOneOverGamma);
    cfg.max_iters = 500;
    let trace = solve_rsd(&a, 2, &x0, &cfg).unwrap();
    let report = verify_contraction(&trace, &s, &cfg).unwrap();
    assert!(report.pass);
    let d0_sq = trace.d0 * trace.d0;
    for d in &trace.dist {
        assert!(d * d <= 2.0 * d0_sq + 1e-9);
    }
}

#[test]
fn probe_accepts_every_step_at_the_minimizer() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let s = spectral_data(&a, 1).unwrap();
    let grid = [0.0, 0.05, 0.1, 0.25, 0.5];
    let eta = angle_monotonicity_probe(&a, 1, &s.leading_block, &grid).unwrap();
    assert_relative_eq!(eta, 0.5);
}

#[test]
fn probe_rejects_empty_grid() {
    let a = diag(&[3.0, 2.0, 1.0]);
    let x = sphere_point(0.3);
    assert!(matches!(
        angle_monotonicity_probe(&a, 1, &x, &[]),
        Err(Error::EmptyGrid)
    ));
}

#[test]
fn probe_finds_a_positive_step_near_the_boundary() {
    // Even with the largest angle near pi/2 (outside the theorems' init
    // region) some strictly positive step keeps all angles non-increasing.
    let mut r = rng(41);
    for _ in 0..5 {
        let spectrum = sampling::random_spectrum_with_gap(6, 2, 1.0, &mut r);
        let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
        let s = spectral_data(&a, 2).unwrap();
        let x = sampling::point_at_angles(&s.leading_block, &[0.4, 1.47], &mut r).unwrap();
        let grid: Vec<f64> = (0..16).map(|i| 1e-6 * 2f64.powi(i)).collect();
        let eta = angle_monotonicity_probe(&a, 2, &x, &grid).unwrap();
        assert!(eta > 0.0, "no monotone step found");
    }
}

#[test]
fn iteration_count_within_the_corollary_prediction() {
    let mut r = rng(43);
    let spectrum = sampling::random_spectrum_with_gap(8, 2, 1.0, &mut r);
    let a = sampling::psd_with_spectrum(&spectrum, true, &mut r).unwrap();
    let s = spectral_data(&a, 2).unwrap();
    let d0 = 0.9;
    let x0 = sampling::point_at_distance(&s.leading_block, d0, &mut r).unwrap();
    let eps = 1e-6;
    let mut cfg = SolverConfig::new(StepRule::CosD0OverGamma);
    let predicted = predicted_iterations(d0, eps, s.delta(), d0.cos() / s.gamma());
    cfg.max_iters = (3.0 * predicted) as usize + 10;
    cfg.dist_tol = eps;
    cfg.fval_tol = 1e-30;
    let trace = solve_rsd(&a, 2, &x0, &cfg).unwrap();
    assert!(*trace.dist.last().unwrap() <= eps);
    assert!(
        (trace.iterations() as f64) <= 3.0 * predicted,
        "took {} iterations, predicted {}",
        trace.iterations(),
        predicted
    );
}
