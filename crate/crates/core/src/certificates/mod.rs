//! Numerical certificates for the convexity-like structure of the block
//! Rayleigh quotient: weak-quasi-convexity, quadratic growth, weak-strong
//! convexity, gradient dominance, the smoothness descent inequality, the
//! geodesic convexity radius around the minimizer, and the explicit
//! counterexample showing why that radius must depend on the eigengap.
//!
//! Every certificate evaluates both sides of an inequality that holds
//! exactly in real arithmetic; residuals therefore reflect only
//! floating-point and backend backward error, and all tolerances are
//! relative: `1e-7 (1 + max(|lhs|, |rhs|))`.

use crate::error::{Error, Result};
use crate::grassmann::{
    distance, largest_principal_angle, log_map, principal_angles, GrassmannPoint,
};
use crate::rayleigh::{
    f_value, hessian_matrix, riemannian_gradient, spectral_data, SpectralData, SymmetricPSDMatrix,
};
use crate::{linalg, sampling};
use nalgebra::DMatrix;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI};

/// Quadratic growth constant c_Q = 4/pi^2 > 0.4.
pub const C_Q: f64 = 4.0 / (PI * PI);

/// Relative certificate tolerance factor.
pub const CERT_TOL: f64 = 1e-7;

/// Angles within this distance of pi/2 are rejected as boundary cases.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Two sides of a paper inequality, normalized so the claim is lhs <= rhs.
#[derive(Clone, Debug)]
pub struct CertificateResult {
    pub lhs: f64,
    pub rhs: f64,
    /// rhs - lhs; non-negative when the inequality holds exactly.
    pub residual: f64,
    /// Relative tolerance the verdict was taken at.
    pub tolerance: f64,
    /// residual >= -tolerance.
    pub holds: bool,
    /// Short description of the inequality and its inputs.
    pub context: String,
}

impl CertificateResult {
    fn new(lhs: f64, rhs: f64, context: String) -> Self {
        let residual = rhs - lhs;
        let tolerance = CERT_TOL * (1.0 + lhs.abs().max(rhs.abs()));
        CertificateResult {
            lhs,
            rhs,
            residual,
            tolerance,
            holds: residual >= -tolerance,
            context,
        }
    }
}

/// Quadratic growth comes with the sharper intermediate bound from its
/// proof; both are reported.
#[derive(Clone, Debug)]
pub struct QuadraticGrowthCertificate {
    /// c_Q delta dist^2 <= f(X) - f*.
    pub bound: CertificateResult,
    /// delta sum_j sin^2(theta_j) <= f(X) - f*.
    pub intermediate: CertificateResult,
}

/// Sufficient geodesic-convexity radius around the minimizer, as a bound on
/// sin^2 of the largest principal angle.
#[derive(Clone, Debug)]
pub struct ConvexityRadius {
    pub sin_sq_bound: f64,
    pub k: usize,
    pub kind: RadiusKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadiusKind {
    /// sin^2(theta_k) <= delta / (lambda_1 + lambda_k), valid for k <= n/2.
    General,
    /// k = 1 only: sin^2(theta_1) <= delta / (delta + lambda_1 - lambda_n).
    SphereK1,
}

/// The general radius plus the sharper sphere bound when k = 1.
#[derive(Clone, Debug)]
pub struct ConvexityRadii {
    pub general: ConvexityRadius,
    pub sphere: Option<ConvexityRadius>,
}

/// The weak-quasi-convexity constant as a function of the largest principal
/// angle: a = theta / tan(theta), with the convention 0/tan 0 = 1.
/// Non-increasing on [0, pi/2).
pub fn wqc_of_angle(theta: f64) -> f64 {
    debug_assert!((0.0..FRAC_PI_2).contains(&theta));
    if theta < 1e-9 {
        1.0
    } else {
        theta / theta.tan()
    }
}

fn theta_max_checked(x: &GrassmannPoint, v_alpha: &GrassmannPoint) -> Result<f64> {
    let theta = largest_principal_angle(x, v_alpha)?;
    if theta >= FRAC_PI_2 - BOUNDARY_TOL {
        return Err(Error::AngleAtBoundary { theta });
    }
    Ok(theta)
}

/// a(X) = theta_k / tan(theta_k) for the largest principal angle theta_k
/// between `x` and `v_alpha`; lies in (0, 1].
pub fn wqc_constant(x: &GrassmannPoint, v_alpha: &GrassmannPoint) -> Result<f64> {
    Ok(wqc_of_angle(theta_max_checked(x, v_alpha)?))
}

struct Instance {
    spec: SpectralData,
    gap: f64,
    a_x: f64,
    dist: f64,
    inner: f64,
}

/// Shared setup: spectral data, optimality gap, a(X), distance and
/// <grad f(X), -Log_X(V_alpha)>.
fn instance(a: &SymmetricPSDMatrix, k: usize, x: &GrassmannPoint) -> Result<Instance> {
    let spec = spectral_data(a, k)?;
    let v_alpha = spec.leading_block.clone();
    let a_x = wqc_constant(x, &v_alpha)?;
    let gap = f_value(a, x)? - spec.f_star;
    let dist = distance(x, &v_alpha)?;
    let grad = riemannian_gradient(a, x)?;
    let log = log_map(x, &v_alpha)?;
    let inner = -grad.inner(&log);
    Ok(Instance {
        spec,
        gap,
        a_x,
        dist,
        inner,
    })
}

/// Weak-quasi-convexity: 2 a(X) (f(X) - f*) <= <grad f(X), -Log_X(V_alpha)>.
/// Holds with equality for k = 1.
pub fn check_weak_quasi_convexity(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
) -> Result<CertificateResult> {
    let inst = instance(a, k, x)?;
    Ok(CertificateResult::new(
        2.0 * inst.a_x * inst.gap,
        inst.inner,
        format!("weak-quasi-convexity, n={}, k={k}", a.n()),
    ))
}

/// Quadratic growth: f(X) - f* >= c_Q delta dist^2(X, V_alpha), with the
/// sharper intermediate bound delta sum_j sin^2(theta_j).
pub fn check_quadratic_growth(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
) -> Result<QuadraticGrowthCertificate> {
    let spec = spectral_data(a, k)?;
    let v_alpha = spec.leading_block.clone();
    theta_max_checked(x, &v_alpha)?;
    let gap = f_value(a, x)? - spec.f_star;
    let angles = principal_angles(x, &v_alpha)?;
    let dist_sq: f64 = angles.angles.iter().map(|t| t * t).sum();
    let sin_sq: f64 = angles.angles.iter().map(|t| t.sin().powi(2)).sum();
    let delta = spec.delta();
    Ok(QuadraticGrowthCertificate {
        bound: CertificateResult::new(
            C_Q * delta * dist_sq,
            gap,
            format!("quadratic growth, n={}, k={k}", a.n()),
        ),
        intermediate: CertificateResult::new(
            delta * sin_sq,
            gap,
            format!("quadratic growth (sin^2 form), n={}, k={k}", a.n()),
        ),
    })
}

/// Weak-strong convexity:
/// f(X) - f* <= (1/a(X)) <grad f(X), -Log_X(V_alpha)> - c_Q delta dist^2.
pub fn check_weak_strong_convexity(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
) -> Result<CertificateResult> {
    let inst = instance(a, k, x)?;
    let rhs = inst.inner / inst.a_x - C_Q * inst.spec.delta() * inst.dist * inst.dist;
    Ok(CertificateResult::new(
        inst.gap,
        rhs,
        format!("weak-strong convexity, n={}, k={k}", a.n()),
    ))
}

/// Gradient dominance (Polyak-Lojasiewicz):
/// |grad f(X)|^2 >= 4 c_Q delta a^2(X) (f(X) - f*).
pub fn check_gradient_dominance(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
) -> Result<CertificateResult> {
    let inst = instance(a, k, x)?;
    let grad = riemannian_gradient(a, x)?;
    let grad_sq = grad.norm().powi(2);
    let bound = 4.0 * C_Q * inst.spec.delta() * inst.a_x * inst.a_x * inst.gap;
    Ok(CertificateResult::new(
        bound,
        grad_sq,
        format!("gradient dominance, n={}, k={k}", a.n()),
    ))
}

/// Smoothness descent inequality:
/// f(X) <= f(Y) + <grad f(Y), Log_Y(X)> + (gamma/2) dist^2(X, Y).
pub fn check_smoothness_descent(
    a: &SymmetricPSDMatrix,
    k: usize,
    x: &GrassmannPoint,
    y: &GrassmannPoint,
) -> Result<CertificateResult> {
    let spec = spectral_data(a, k)?;
    let d = distance(x, y)?;
    if d >= FRAC_PI_2 {
        return Err(Error::NotInInjectivityDomain { sigma_min: d.cos() });
    }
    let grad_y = riemannian_gradient(a, y)?;
    let log_yx = log_map(y, x)?;
    let rhs = f_value(a, y)? + grad_y.inner(&log_yx) + 0.5 * spec.gamma() * d * d;
    Ok(CertificateResult::new(
        f_value(a, x)?,
        rhs,
        format!("smoothness descent, n={}, k={k}", a.n()),
    ))
}

/// Sufficient geodesic-convexity radius: sin^2(theta_k) <= delta /
/// (lambda_1 + lambda_k) in general (k <= n/2), and the sharper
/// delta / (delta + lambda_1 - lambda_n) on the sphere (k = 1). Both bounds
/// never exceed 1/2.
pub fn convexity_radius(spec: &SpectralData, k: usize) -> Result<ConvexityRadii> {
    let n = spec.n();
    if k != spec.k() {
        return Err(Error::BadK { n, k });
    }
    if 2 * k > n {
        return Err(Error::PreconditionViolated(format!(
            "the general convexity radius requires k <= n/2, got n={n}, k={k}"
        )));
    }
    let delta = spec.delta();
    let lambda = &spec.eigenvalues;
    let denom = lambda[0] + lambda[k - 1];
    let general = ConvexityRadius {
        sin_sq_bound: if delta > 0.0 && denom > 0.0 {
            delta / denom
        } else {
            0.0
        },
        k,
        kind: RadiusKind::General,
    };
    let sphere = (k == 1).then(|| {
        let denom = delta + lambda[0] - lambda[n - 1];
        ConvexityRadius {
            sin_sq_bound: if delta > 0.0 && denom > 0.0 {
                delta / denom
            } else {
                0.0
            },
            k,
            kind: RadiusKind::SphereK1,
        }
    });
    Ok(ConvexityRadii { general, sphere })
}

/// Samples points with sin^2(theta_k) inside the general convexity radius
/// and returns the smallest Hessian eigenvalue seen. Geodesic convexity on
/// the region is equivalent to this staying non-negative.
pub fn min_hessian_eig_in_region<R: Rng>(
    a: &SymmetricPSDMatrix,
    k: usize,
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    let spec = spectral_data(a, k)?;
    let radii = convexity_radius(&spec, k)?;
    let theta_cap = radii.general.sin_sq_bound.sqrt().asin();
    let mut min_eig = f64::INFINITY;
    for _ in 0..samples {
        let theta_k: f64 = rng.random_range(0.0..=theta_cap);
        let mut angles: Vec<f64> = (0..k - 1).map(|_| rng.random_range(0.0..=theta_k)).collect();
        angles.push(theta_k);
        angles.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let x = sampling::point_at_angles(&spec.leading_block, &angles, rng)?;
        let h = hessian_matrix(a, &x)?;
        let (eigs, _) = linalg::sym_eigen_desc(&h);
        min_eig = min_eig.min(*eigs.last().unwrap());
    }
    Ok(min_eig)
}

/// Evaluates the explicit Hessian counterexample to the gap-independent
/// convexity-region claim of prior work, on its own cost expression:
///
/// ```text
/// -2 Tr(M^T D D^T (I - Xp Xp^T) M) + |(D Xp^T + Xp D^T) M|_F^2
/// ```
///
/// with the fixed 4x2 matrices Xp, Up, M = Up diag(1, eps) and unit tangent
/// D. The value equals (eps^2 - 1) c^2 with c^2 = 1/2, strictly negative
/// for eps < 1 although the point lies inside the claimed region.
pub fn counterexample_hessian(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::BadEpsilon(eps));
    }
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let xp = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let up = DMatrix::from_row_slice(4, 2, &[c, 0.0, 0.0, c, c, 0.0, 0.0, c]);
    let m = &up * DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, eps]);
    let d = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);

    let proj = DMatrix::identity(4, 4) - &xp * xp.transpose();
    let term1 = -2.0 * (m.transpose() * &d * d.transpose() * proj * &m).trace();
    let sym = &d * xp.transpose() + &xp * d.transpose();
    let term2 = (sym * &m).norm().powi(2);
    Ok(term1 + term2)
}
