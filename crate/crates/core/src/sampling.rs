//! Seeded random constructions: orthogonal matrices, subspaces, horizontal
//! directions, PSD matrices with prescribed spectra, and points at a
//! prescribed distance or prescribed principal angles from a base point.

use crate::error::{Error, Result};
use crate::grassmann::{exp_map, GrassmannPoint, TangentVector};
use crate::linalg;
use crate::rayleigh::SymmetricPSDMatrix;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// n x k matrix with i.i.d. standard normal entries.
pub fn gaussian_matrix<R: Rng>(n: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(n, k, |_, _| rng.sample(StandardNormal))
}

/// Haar-ish random orthogonal matrix: thin QR of a Gaussian matrix with the
/// deterministic sign convention.
pub fn random_orthogonal<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let (q, _) = linalg::thin_qr(&gaussian_matrix(dim, dim, rng));
    q
}

/// Uniformly random point of Gr(n,k).
pub fn random_point<R: Rng>(n: usize, k: usize, rng: &mut R) -> GrassmannPoint {
    let (q, _) = linalg::thin_qr(&gaussian_matrix(n, k, rng));
    GrassmannPoint::from_orthonormal(q).expect("QR of a Gaussian matrix is orthonormal")
}

/// Random horizontal direction at `x` (Gaussian, projected; not normalized).
pub fn random_horizontal<R: Rng>(x: &GrassmannPoint, rng: &mut R) -> TangentVector {
    let m = gaussian_matrix(x.n(), x.k(), rng);
    crate::grassmann::project_tangent(x, &m).expect("shapes match by construction")
}

/// Random horizontal direction rescaled so its singular values have the
/// given l2 norm; `exp_map` then lands exactly `dist` away when
/// `dist < pi/2`.
pub fn random_tangent_with_norm<R: Rng>(
    x: &GrassmannPoint,
    dist: f64,
    rng: &mut R,
) -> TangentVector {
    let g = random_horizontal(x, rng);
    let norm = g.norm();
    if norm == 0.0 || dist == 0.0 {
        return TangentVector::zero(x);
    }
    g.scale(dist / norm)
}

/// Point at intrinsic distance exactly `dist` from `x`, along a seeded
/// random geodesic. Requires `0 <= dist < pi/2`.
pub fn point_at_distance<R: Rng>(
    x: &GrassmannPoint,
    dist: f64,
    rng: &mut R,
) -> Result<GrassmannPoint> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&dist) {
        return Err(Error::PreconditionViolated(format!(
            "distance must lie in [0, pi/2), got {dist}"
        )));
    }
    if dist == 0.0 {
        return Ok(x.clone());
    }
    let g = random_tangent_with_norm(x, dist, rng);
    exp_map(x, &g)
}

/// Point whose principal angles to `x` are exactly the given ascending
/// values, along a seeded random direction of prescribed singular values.
/// Requires `k <= n/2` and all angles in `[0, pi/2)`.
pub fn point_at_angles<R: Rng>(
    x: &GrassmannPoint,
    angles: &[f64],
    rng: &mut R,
) -> Result<GrassmannPoint> {
    let (n, k) = (x.n(), x.k());
    if angles.len() != k {
        return Err(Error::PreconditionViolated(format!(
            "expected {k} angles, got {}",
            angles.len()
        )));
    }
    if 2 * k > n {
        return Err(Error::PreconditionViolated(format!(
            "prescribed angles require k <= n/2, got n={n}, k={k}"
        )));
    }
    if angles
        .iter()
        .any(|t| !(0.0..std::f64::consts::FRAC_PI_2).contains(t))
    {
        return Err(Error::PreconditionViolated(
            "all angles must lie in [0, pi/2)".into(),
        ));
    }
    // G = U diag(angles) V^T with U horizontal orthonormal and V orthogonal:
    // the singular values of G are the principal angles of exp(x, G).
    let complement = x.complement();
    let (u_dir, _) = linalg::thin_qr(&gaussian_matrix(n - k, k, rng));
    let u = &complement * u_dir;
    let v = random_orthogonal(k, rng);
    let mut diag = DMatrix::zeros(k, k);
    for (i, &t) in angles.iter().enumerate() {
        diag[(i, i)] = t;
    }
    let g = crate::grassmann::TangentVector::new(x, &u * diag * v.transpose())?;
    exp_map(x, &g)
}

/// Symmetric PSD matrix Q diag(spectrum) Q^T with the given descending
/// non-negative spectrum; Q is identity when `rotate` is false, otherwise a
/// seeded random orthogonal matrix.
pub fn psd_with_spectrum<R: Rng>(
    spectrum: &[f64],
    rotate: bool,
    rng: &mut R,
) -> Result<SymmetricPSDMatrix> {
    validate_spectrum(spectrum)?;
    let n = spectrum.len();
    let a = if rotate {
        let q = random_orthogonal(n, rng);
        let mut lambda_qt = q.transpose();
        for (i, &l) in spectrum.iter().enumerate() {
            lambda_qt.row_mut(i).scale_mut(l);
        }
        let raw = &q * lambda_qt;
        // Symmetrize away the last-ulp asymmetry of the triple product.
        (&raw + raw.transpose()) * 0.5
    } else {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(spectrum))
    };
    SymmetricPSDMatrix::new(a)
}

/// Checks a spectrum is non-empty, non-negative and descending.
pub fn validate_spectrum(spectrum: &[f64]) -> Result<()> {
    if spectrum.len() < 2 {
        return Err(Error::BadSpectrum(format!(
            "need at least 2 eigenvalues, got {}",
            spectrum.len()
        )));
    }
    if spectrum.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::BadSpectrum(
            "eigenvalues must be finite and non-negative".into(),
        ));
    }
    if spectrum.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::BadSpectrum("eigenvalues must be descending".into()));
    }
    Ok(())
}

/// Random descending spectrum of length `n` with eigengap exactly `delta`
/// at position `k`: trailing values uniform in [0.5, 2], leading values
/// stacked above `lambda_{k+1} + delta` by uniform increments.
pub fn random_spectrum_with_gap<R: Rng>(n: usize, k: usize, delta: f64, rng: &mut R) -> Vec<f64> {
    assert!(k >= 1 && k < n, "need 1 <= k < n");
    let mut tail: Vec<f64> = (0..n - k).map(|_| rng.random_range(0.5..2.0)).collect();
    tail.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut head = vec![tail[0] + delta];
    for _ in 1..k {
        let bump: f64 = rng.random_range(0.0..1.0);
        head.push(head.last().unwrap() + bump);
    }
    head.reverse();
    head.extend_from_slice(&tail);
    head
}
