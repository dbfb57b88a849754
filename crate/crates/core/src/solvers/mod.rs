//! Riemannian steepest descent on Gr(n,k) for the block Rayleigh quotient,
//! with the step-size rules the convergence theory admits, a classical
//! subspace-iteration baseline, and monitors that re-verify the proved
//! bounds on recorded traces.

use crate::certificates::{wqc_of_angle, C_Q};
use crate::error::{Error, Result};
use crate::grassmann::{distance, exp_map, largest_principal_angle, GrassmannPoint};
use crate::rayleigh::{
    f_value, riemannian_gradient, spectral_data, SpectralData, SymmetricPSDMatrix,
};
use crate::{linalg, sampling};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Step-size rules with convergence guarantees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepRule {
    /// eta_t = a(X_t)/gamma: the largest step for which one-step distance
    /// contraction is proved.
    AdaptiveAOverGamma,
    /// eta = cos(dist(X_0, V_alpha))/gamma, constant per run: the maximal
    /// constant step of the linear-rate theorem.
    CosD0OverGamma,
    /// eta = 1/gamma: the tractable step of the appendix analysis; needs
    /// initialization within pi/4 for its rates.
    FixedOneOverGamma,
    /// A caller-chosen constant step; no hypothesis is enforced.
    FixedEta(f64),
}

/// Convergence and stopping configuration for a single solve.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub step_rule: StepRule,
    pub max_iters: usize,
    /// Distance stopping threshold (radians); only consulted when the
    /// eigengap is positive, since otherwise the minimizer is not unique.
    pub dist_tol: f64,
    /// Optimality-gap stopping threshold; always consulted.
    pub fval_tol: f64,
    pub seed: u64,
    /// Standard deviation of i.i.d. Gaussian noise added to A X in the step
    /// gradient (fresh each iteration); 0 means exact matvecs. Monitors
    /// always use the exact A.
    pub noise_sigma: f64,
    /// Record theoretical-bound columns in the trace.
    pub record_bounds: bool,
    /// Keep a copy of every iterate's representative in the trace.
    pub store_iterates: bool,
}

impl SolverConfig {
    pub fn new(step_rule: StepRule) -> Self {
        SolverConfig {
            step_rule,
            max_iters: 10_000,
            dist_tol: 1e-8,
            fval_tol: 1e-13,
            seed: 0,
            noise_sigma: 0.0,
            record_bounds: true,
            store_iterates: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dist_tol > 0.0) || !(self.fval_tol > 0.0) {
            return Err(Error::PreconditionViolated(
                "stopping tolerances must be positive".into(),
            ));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::PreconditionViolated(
                "noise sigma must be non-negative".into(),
            ));
        }
        if let StepRule::FixedEta(eta) = self.step_rule {
            if !(eta >= 0.0) || !eta.is_finite() {
                return Err(Error::PreconditionViolated(format!(
                    "fixed step size must be finite and non-negative, got {eta}"
                )));
            }
        }
        Ok(())
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    DistTol,
    FvalTol,
    GradientZero,
    MaxIters,
    /// Subspace iteration reached an invariant subspace exactly.
    FixedPoint,
}

/// Per-iteration record of a run, including the theoretical-bound columns
/// the monitors check against.
#[derive(Clone, Debug)]
pub struct ConvergenceTrace {
    pub f: Vec<f64>,
    /// f_t - f*, clamped at zero against rounding.
    pub gap: Vec<f64>,
    /// dist(X_t, V_alpha).
    pub dist: Vec<f64>,
    /// Largest principal angle to V_alpha.
    pub theta_max: Vec<f64>,
    pub grad_norm_f: Vec<f64>,
    pub grad_norm_2: Vec<f64>,
    /// Step size used to leave row t (None for the baseline iteration).
    pub eta: Vec<Option<f64>>,
    /// a(X_t) = theta_k/tan(theta_k); None at or beyond the pi/2 boundary.
    pub a: Vec<Option<f64>>,
    /// (1 - c_Q cos(d0) delta eta)^t dist_0^2 when the linear-rate theorem
    /// applies to the configured rule.
    pub linear_bound: Option<Vec<f64>>,
    /// Gap-free O(1/t) bound when the configured rule admits one.
    pub sublinear_bound: Option<Vec<f64>>,
    /// Lyapunov function E(t) = (1/gamma) gap_t + dist_t^2 / 2.
    pub lyapunov: Option<Vec<f64>>,
    /// dist(X_0, V_alpha), measured once.
    pub d0: f64,
    pub stop: StopReason,
    /// Iterate representatives when requested.
    pub iterates: Option<Vec<DMatrix<f64>>>,
}

impl ConvergenceTrace {
    /// Number of recorded rows (iterations + 1).
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Number of steps actually taken.
    pub fn iterations(&self) -> usize {
        self.len() - 1
    }
}

/// Per-step and per-iterate booleans for the recorded-bound checks, plus the
/// aggregate verdict. Checks whose hypotheses do not apply at a step are
/// vacuously true.
#[derive(Clone, Debug)]
pub struct ContractionReport {
    /// (i) one-step contraction of squared distance, where eta_t <= a_t/gamma.
    pub contraction: Vec<bool>,
    /// (ii) dist_t^2 <= 2 dist_0^2 while the angle stays below pi/2
    /// (rules with eta <= 1/gamma).
    pub cap: Vec<bool>,
    /// (iii) Lyapunov non-increase E(t+1) <= E(t) + 1e-9.
    pub lyapunov: Vec<bool>,
    /// (iv) recorded global linear/sublinear bounds hold at every row.
    pub bounds: Vec<bool>,
    pub pass: bool,
}

const BOUND_SLACK: f64 = 1e-9;

/// One steepest-descent step: Exp_X(-eta grad f(X)). Returns X unchanged if
/// the gradient is numerically zero.
pub fn rsd_step(a: &SymmetricPSDMatrix, x: &GrassmannPoint, eta: f64) -> Result<GrassmannPoint> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(Error::PreconditionViolated(format!(
            "step size must be finite and non-negative, got {eta}"
        )));
    }
    let grad = riemannian_gradient(a, x)?;
    if grad.norm() < 1e-13 * (1.0 + a.entries().norm()) {
        return Ok(x.clone());
    }
    exp_map(x, &grad.scale(-eta))
}

/// Step size under the given rule at `x`, with `d0` the initial distance of
/// the run (used by the cosine rule).
pub fn compute_step(
    spec: &SpectralData,
    rule: &StepRule,
    x: &GrassmannPoint,
    d0: f64,
) -> Result<f64> {
    if let StepRule::FixedEta(eta) = rule {
        if !(0.0..f64::INFINITY).contains(eta) {
            return Err(Error::PreconditionViolated(format!(
                "fixed step size must be finite and non-negative, got {eta}"
            )));
        }
        return Ok(*eta);
    }
    let gamma = spec.gamma();
    if spec.is_gamma_degenerate() || gamma <= 0.0 {
        return Err(Error::DegenerateSpectrum { gamma });
    }
    match rule {
        StepRule::AdaptiveAOverGamma => {
            let theta = largest_principal_angle(x, &spec.leading_block)?;
            if theta >= FRAC_PI_2 - 1e-9 {
                return Err(Error::AngleAtBoundary { theta });
            }
            Ok(wqc_of_angle(theta) / gamma)
        }
        StepRule::CosD0OverGamma => {
            if !(0.0..FRAC_PI_2).contains(&d0) {
                return Err(Error::HypothesisViolated(
                    "initialization outside pi/2".into(),
                ));
            }
            Ok(d0.cos() / gamma)
        }
        StepRule::FixedOneOverGamma => Ok(1.0 / gamma),
        StepRule::FixedEta(_) => unreachable!(),
    }
}

fn rule_needs_init_in_pi2(rule: &StepRule) -> bool {
    matches!(
        rule,
        StepRule::AdaptiveAOverGamma | StepRule::CosD0OverGamma
    )
}

struct RowScratch {
    f: f64,
    gap: f64,
    dist: f64,
    theta: f64,
    grad_f: f64,
    grad_2: f64,
    a: Option<f64>,
}

fn measure(
    a: &SymmetricPSDMatrix,
    spec: &SpectralData,
    x: &GrassmannPoint,
) -> Result<RowScratch> {
    let f = f_value(a, x)?;
    let dist = distance(x, &spec.leading_block)?;
    let theta = largest_principal_angle(x, &spec.leading_block)?;
    let grad = riemannian_gradient(a, x)?;
    Ok(RowScratch {
        f,
        gap: (f - spec.f_star).max(0.0),
        dist,
        theta,
        grad_f: grad.norm(),
        grad_2: grad.spectral_norm(),
        a: (theta < FRAC_PI_2 - 1e-9).then(|| wqc_of_angle(theta)),
    })
}

struct TraceBuilder {
    f: Vec<f64>,
    gap: Vec<f64>,
    dist: Vec<f64>,
    theta_max: Vec<f64>,
    grad_norm_f: Vec<f64>,
    grad_norm_2: Vec<f64>,
    eta: Vec<Option<f64>>,
    a: Vec<Option<f64>>,
    iterates: Option<Vec<DMatrix<f64>>>,
}

impl TraceBuilder {
    fn new(store_iterates: bool) -> Self {
        TraceBuilder {
            f: Vec::new(),
            gap: Vec::new(),
            dist: Vec::new(),
            theta_max: Vec::new(),
            grad_norm_f: Vec::new(),
            grad_norm_2: Vec::new(),
            eta: Vec::new(),
            a: Vec::new(),
            iterates: store_iterates.then(Vec::new),
        }
    }

    fn push(&mut self, row: &RowScratch, eta: Option<f64>, x: &GrassmannPoint) {
        self.f.push(row.f);
        self.gap.push(row.gap);
        self.dist.push(row.dist);
        self.theta_max.push(row.theta);
        self.grad_norm_f.push(row.grad_f);
        self.grad_norm_2.push(row.grad_2);
        self.eta.push(eta);
        self.a.push(row.a);
        if let Some(reps) = self.iterates.as_mut() {
            reps.push(x.representative().clone());
        }
    }

    fn finish(
        self,
        cfg: &SolverConfig,
        spec: &SpectralData,
        d0: f64,
        stop: StopReason,
        is_rsd: bool,
    ) -> ConvergenceTrace {
        let rows = self.f.len();
        let mut linear_bound = None;
        let mut sublinear_bound = None;
        let mut lyapunov = None;
        let gamma = spec.gamma();
        if cfg.record_bounds && is_rsd && gamma > 0.0 && !spec.is_gamma_degenerate() {
            let gap0 = self.gap[0];
            let d0_sq = d0 * d0;
            let eta_cos = d0.cos() / gamma;
            if spec.delta() > 0.0 && rule_needs_init_in_pi2(&cfg.step_rule) && d0 < FRAC_PI_2 {
                let factor = 1.0 - C_Q * d0.cos() * spec.delta() * eta_cos;
                linear_bound = Some(
                    (0..rows)
                        .map(|t| factor.powi(t as i32) * d0_sq)
                        .collect(),
                );
            }
            // Gap-free O(1/t) bound: the main-text form for constant steps
            // within cos(d0)/gamma, the appendix form for the 1/gamma rule
            // started within pi/4.
            let sub_eta = match cfg.step_rule {
                StepRule::CosD0OverGamma if d0 < FRAC_PI_2 => Some(eta_cos),
                StepRule::FixedEta(e) if d0 < FRAC_PI_2 && e > 0.0 && e <= eta_cos => Some(e),
                _ => None,
            };
            if let Some(eta) = sub_eta {
                let c0 = d0.cos();
                sublinear_bound = Some(
                    (0..rows)
                        .map(|t| (2.0 * gamma + 1.0 / eta) / (c0 * t as f64 + 1.0) * d0_sq)
                        .collect(),
                );
            } else if cfg.step_rule == StepRule::FixedOneOverGamma && d0 <= FRAC_PI_4 + 1e-12 {
                sublinear_bound = Some(
                    (0..rows)
                        .map(|t| (gap0 + 0.5 * gamma * d0_sq) / (0.4 * t as f64 + 1.0))
                        .collect(),
                );
            }
            lyapunov = Some(
                self.gap
                    .iter()
                    .zip(self.dist.iter())
                    .map(|(g, d)| g / gamma + 0.5 * d * d)
                    .collect(),
            );
        }
        ConvergenceTrace {
            f: self.f,
            gap: self.gap,
            dist: self.dist,
            theta_max: self.theta_max,
            grad_norm_f: self.grad_norm_f,
            grad_norm_2: self.grad_norm_2,
            eta: self.eta,
            a: self.a,
            linear_bound,
            sublinear_bound,
            lyapunov,
            d0,
            stop,
            iterates: self.iterates,
        }
    }
}

/// Runs Riemannian steepest descent from `x0` until a stopping tolerance or
/// the iteration cap fires, recording the full convergence trace.
///
/// The reference subspace V_alpha and all monitor quantities come from the
/// exact spectral data even in noisy-gradient mode; noise only perturbs the
/// step direction.
pub fn solve_rsd(
    a: &SymmetricPSDMatrix,
    k: usize,
    x0: &GrassmannPoint,
    cfg: &SolverConfig,
) -> Result<ConvergenceTrace> {
    cfg.validate()?;
    let spec = spectral_data(a, k)?;
    if spec.is_gamma_degenerate() && !matches!(cfg.step_rule, StepRule::FixedEta(_)) {
        return Err(Error::DegenerateSpectrum {
            gamma: spec.gamma(),
        });
    }
    let d0 = distance(x0, &spec.leading_block)?;
    if rule_needs_init_in_pi2(&cfg.step_rule) && d0 >= FRAC_PI_2 {
        return Err(Error::HypothesisViolated(
            "initialization outside pi/2".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grad_zero_tol = 1e-13 * spec.gamma().max(f64::MIN_POSITIVE);
    let mut builder = TraceBuilder::new(cfg.store_iterates);
    let mut x = x0.clone();
    let stop;
    let mut t = 0usize;
    loop {
        let row = measure(a, &spec, &x)?;
        let eta = compute_step(&spec, &cfg.step_rule, &x, d0)?;
        builder.push(&row, Some(eta), &x);

        if !spec.is_gap_degenerate() && row.dist <= cfg.dist_tol {
            stop = StopReason::DistTol;
            break;
        }
        if row.gap <= cfg.fval_tol {
            stop = StopReason::FvalTol;
            break;
        }
        if t >= cfg.max_iters {
            stop = StopReason::MaxIters;
            break;
        }

        // Step gradient: exact, or with Gaussian-injected matvecs.
        let xr = x.representative();
        let ax = if cfg.noise_sigma > 0.0 {
            a.apply(xr) + cfg.noise_sigma * sampling::gaussian_matrix(x.n(), k, &mut rng)
        } else {
            a.apply(xr)
        };
        let g_step = -2.0 * (&ax - xr * (xr.transpose() * &ax));
        if g_step.norm() < grad_zero_tol {
            stop = StopReason::GradientZero;
            break;
        }
        let g = crate::grassmann::TangentVector::new_unchecked(&x, g_step);
        x = exp_map(&x, &g.scale(-eta))?;
        t += 1;
    }
    Ok(builder.finish(cfg, &spec, d0, stop, true))
}

/// The classical baseline X_{t+1} = orth(A X_t) (thin QR), with the same
/// trace schema and stopping rules as `solve_rsd`.
pub fn subspace_iteration(
    a: &SymmetricPSDMatrix,
    k: usize,
    x0: &GrassmannPoint,
    cfg: &SolverConfig,
) -> Result<ConvergenceTrace> {
    cfg.validate()?;
    let spec = spectral_data(a, k)?;
    let d0 = distance(x0, &spec.leading_block)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut builder = TraceBuilder::new(cfg.store_iterates);
    let mut x = x0.clone();
    let stop;
    let mut t = 0usize;
    loop {
        let row = measure(a, &spec, &x)?;
        builder.push(&row, None, &x);

        if !spec.is_gap_degenerate() && row.dist <= cfg.dist_tol {
            stop = StopReason::DistTol;
            break;
        }
        if row.gap <= cfg.fval_tol {
            stop = StopReason::FvalTol;
            break;
        }
        if t >= cfg.max_iters {
            stop = StopReason::MaxIters;
            break;
        }

        let mut ax = a.apply(x.representative());
        if cfg.noise_sigma > 0.0 {
            ax += cfg.noise_sigma * sampling::gaussian_matrix(x.n(), k, &mut rng);
        }
        x = match crate::grassmann::make_point(&ax) {
            Ok(next) => next,
            Err(Error::RankDeficient { .. }) => return Err(Error::RankCollapse { step: t }),
            Err(e) => return Err(e),
        };
        t += 1;
    }
    Ok(builder.finish(cfg, &spec, d0, stop, false))
}

/// Re-verifies the proved per-step and global bounds on a recorded trace.
pub fn verify_contraction(
    trace: &ConvergenceTrace,
    spec: &SpectralData,
    cfg: &SolverConfig,
) -> Result<ContractionReport> {
    if trace.lyapunov.is_none() {
        return Err(Error::MissingBounds);
    }
    let rows = trace.len();
    let gamma = spec.gamma();
    let delta = spec.delta();
    let d0_sq = trace.d0 * trace.d0;

    // (i) One-step contraction where the step satisfies the lemma's
    // hypothesis eta_t <= a(X_t)/gamma.
    let mut contraction = vec![true; rows.saturating_sub(1)];
    for t in 0..rows.saturating_sub(1) {
        if let (Some(a_t), Some(eta_t)) = (trace.a[t], trace.eta[t]) {
            if eta_t <= a_t / gamma * (1.0 + 1e-12) {
                let factor = (1.0 - 2.0 * C_Q * delta * a_t * eta_t).max(0.0);
                let lhs = trace.dist[t + 1] * trace.dist[t + 1];
                let rhs = factor * trace.dist[t] * trace.dist[t];
                contraction[t] = lhs <= rhs + BOUND_SLACK;
            }
        }
    }

    // Rules with eta <= 1/gamma admit the factor-2 cap and the Lyapunov
    // decrease, conditionally on the angle staying below pi/2 so far.
    let small_step = |t: usize| -> bool {
        match cfg.step_rule {
            StepRule::FixedEta(e) => e <= 1.0 / gamma * (1.0 + 1e-12),
            _ => trace.eta[t].is_some_and(|e| e <= 1.0 / gamma * (1.0 + 1e-12)),
        }
    };
    let mut inside = true;
    let mut cap = vec![true; rows];
    let mut lyapunov_ok = vec![true; rows.saturating_sub(1)];
    let e = trace.lyapunov.as_ref().unwrap();
    for t in 0..rows {
        inside = inside && trace.theta_max[t] < FRAC_PI_2;
        if inside && small_step(t.min(rows - 2)) {
            cap[t] = trace.dist[t] * trace.dist[t] <= 2.0 * d0_sq + BOUND_SLACK;
            if t + 1 < rows {
                lyapunov_ok[t] = e[t + 1] <= e[t] + BOUND_SLACK;
            }
        }
    }

    // (iv) Global rate bounds recorded in the trace.
    let mut bounds = vec![true; rows];
    if let Some(lb) = &trace.linear_bound {
        for t in 0..rows {
            bounds[t] = bounds[t] && trace.dist[t] * trace.dist[t] <= lb[t] + BOUND_SLACK;
        }
    }
    if let Some(sb) = &trace.sublinear_bound {
        for t in 0..rows {
            bounds[t] = bounds[t] && trace.gap[t] <= sb[t] + BOUND_SLACK;
        }
    }

    let pass = contraction.iter().all(|&b| b)
        && cap.iter().all(|&b| b)
        && lyapunov_ok.iter().all(|&b| b)
        && bounds.iter().all(|&b| b);
    Ok(ContractionReport {
        contraction,
        cap,
        lyapunov: lyapunov_ok,
        bounds,
        pass,
    })
}

/// Probes one-step monotonicity of all principal angles to V_alpha over a
/// grid of step sizes, returning the largest grid value for which no angle
/// increased (beyond 1e-12), or 0 when none qualifies.
pub fn angle_monotonicity_probe(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
    eta_grid: &[f64],
) -> Result<f64> {
    if eta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if eta_grid.windows(2).any(|w| w[0] > w[1]) || eta_grid.iter().any(|&e| !(e >= 0.0)) {
        return Err(Error::PreconditionViolated(
            "step grid must be non-negative and ascending".into(),
        ));
    }
    let spec = spectral_data(a, k)?;
    let before = crate::grassmann::principal_angles(x, &spec.leading_block)?.angles;
    for &eta in eta_grid.iter().rev() {
        let stepped = rsd_step(a, x, eta)?;
        let after = crate::grassmann::principal_angles(&stepped, &spec.leading_block)?.angles;
        if after
            .iter()
            .zip(before.iter())
            .all(|(na, ob)| *na <= *ob + 1e-12)
        {
            return Ok(eta);
        }
    }
    Ok(0.0)
}

/// Iteration budget predicted by the linear-rate corollary for reaching
/// distance `eps` from initial distance `d0` with constant step `eta`.
pub fn predicted_iterations(d0: f64, eps: f64, delta: f64, eta: f64) -> f64 {
    let q: f64 = 1.0 - 0.4 * d0.cos() * delta * eta;
    if q <= 0.0 {
        return 1.0;
    }
    2.0 * (d0.ln() - eps.ln()) / (-q.ln()) + 1.0
}

/// Exact-gradient check used by tests: the spectral norm of the gradient
/// never exceeds gamma/2.
pub fn gradient_norm_bound_residual(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
) -> Result<f64> {
    let spec = spectral_data(a, k)?;
    let grad = riemannian_gradient(a, x)?;
    Ok(0.5 * spec.gamma() - linalg::spectral_norm(grad.matrix()))
}

#[cfg(test)]
mod tests;
