//! Differential geometry of the Grassmann manifold Gr(n,k).
//!
//! A point of Gr(n,k) is a k-dimensional subspace of R^n, represented by an
//! n x k matrix with orthonormal columns. Representatives are unique only up
//! to a right orthogonal factor; every contract in this module is therefore
//! phrased on subspaces and principal-angle multisets, never on individual
//! factor columns.

mod cs;

pub use cs::{cs_blocks, geodesic_pair, span_distance, CsBlocks};

use crate::error::{Error, Result};
use crate::linalg;
use nalgebra::DMatrix;

/// Orthonormality tolerance for point representatives.
pub const POINT_TOL: f64 = 1e-12;
/// Horizontality tolerance for tangent vectors.
pub const HORIZONTAL_TOL: f64 = 1e-10;
/// Relative rank tolerance for `make_point`.
pub const RANK_TOL: f64 = 1e-10;
/// Smallest singular value of X^T Y for the log map to be defined.
pub const INJECTIVITY_TOL: f64 = 1e-10;
/// Tangents below this Frobenius norm are treated as zero by `exp_map`.
pub const ZERO_TANGENT_TOL: f64 = 1e-14;

/// A subspace of R^n given by an n x k orthonormal representative.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannPoint {
    rep: DMatrix<f64>,
}

impl GrassmannPoint {
    /// Wraps an already orthonormal representative, validating
    /// `|X^T X - I| <= 1e-12` and `1 <= k < n`.
    pub fn from_orthonormal(rep: DMatrix<f64>) -> Result<Self> {
        let (n, k) = rep.shape();
        if k == 0 || k >= n {
            return Err(Error::BadK { n, k });
        }
        let residual = linalg::orthonormality_residual(&rep);
        if residual > POINT_TOL {
            return Err(Error::PreconditionViolated(format!(
                "representative is not orthonormal: |X^T X - I| = {residual:.3e}"
            )));
        }
        Ok(Self { rep })
    }

    pub(crate) fn from_orthonormal_unchecked(rep: DMatrix<f64>) -> Self {
        Self { rep }
    }

    /// The orthonormal representative X.
    pub fn representative(&self) -> &DMatrix<f64> {
        &self.rep
    }

    /// Ambient dimension n.
    pub fn n(&self) -> usize {
        self.rep.nrows()
    }

    /// Subspace dimension k.
    pub fn k(&self) -> usize {
        self.rep.ncols()
    }

    /// Orthogonal projector X X^T onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.rep * self.rep.transpose()
    }

    /// Orthonormal basis of the orthogonal complement, from the full QR of
    /// the representative (deterministic sign convention).
    pub fn complement(&self) -> DMatrix<f64> {
        linalg::orthonormal_completion(&self.rep)
    }
}

/// A tangent vector of Gr(n,k): an n x k matrix G with X^T G = 0, attached
/// to the representative X it was expressed in.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: GrassmannPoint,
    mat: DMatrix<f64>,
}

impl TangentVector {
    /// Validates shape and horizontality `|X^T G| <= 1e-10`.
    pub fn new(base: &GrassmannPoint, mat: DMatrix<f64>) -> Result<Self> {
        if mat.shape() != base.rep.shape() {
            return Err(shape_mismatch(base.rep.shape(), mat.shape()));
        }
        let residual = (base.rep.transpose() * &mat).norm();
        if residual > HORIZONTAL_TOL {
            return Err(Error::NotHorizontal { residual });
        }
        Ok(Self {
            base: base.clone(),
            mat,
        })
    }

    pub(crate) fn new_unchecked(base: &GrassmannPoint, mat: DMatrix<f64>) -> Self {
        Self {
            base: base.clone(),
            mat,
        }
    }

    /// Zero tangent at `base`.
    pub fn zero(base: &GrassmannPoint) -> Self {
        let mat = DMatrix::zeros(base.n(), base.k());
        Self {
            base: base.clone(),
            mat,
        }
    }

    pub fn base(&self) -> &GrassmannPoint {
        &self.base
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Frobenius norm, the Riemannian norm on Gr(n,k).
    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Spectral norm; the exponential map is injective on `|G|_2 < pi/2`.
    pub fn spectral_norm(&self) -> f64 {
        linalg::spectral_norm(&self.mat)
    }

    /// Riemannian inner product <G, H> = Tr(G^T H).
    pub fn inner(&self, other: &TangentVector) -> f64 {
        self.mat.dot(&other.mat)
    }

    pub fn scale(&self, s: f64) -> TangentVector {
        Self {
            base: self.base.clone(),
            mat: &self.mat * s,
        }
    }
}

/// Principal angles between two subspaces together with the SVD factors of
/// Y^T X = U1 cos(theta) V1^T.
#[derive(Clone, Debug)]
pub struct PrincipalAngleDecomposition {
    /// Angles in [0, pi/2], sorted ascending.
    pub angles: Vec<f64>,
    /// Left factor U1 (k x k orthogonal).
    pub left_factor: DMatrix<f64>,
    /// Right factor V1 (k x k orthogonal).
    pub right_factor: DMatrix<f64>,
}

impl PrincipalAngleDecomposition {
    /// Largest principal angle theta_k.
    pub fn theta_max(&self) -> f64 {
        self.angles.last().copied().unwrap_or(0.0)
    }

    /// l2 norm of the angle vector: the intrinsic distance.
    pub fn distance(&self) -> f64 {
        self.angles.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// Reconstruction U1 diag(cos theta) V1^T, for residual checks.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let k = self.angles.len();
        let mut c = DMatrix::zeros(k, k);
        for (i, t) in self.angles.iter().enumerate() {
            c[(i, i)] = t.cos();
        }
        &self.left_factor * c * self.right_factor.transpose()
    }
}

fn shape_mismatch(expected: (usize, usize), got: (usize, usize)) -> Error {
    Error::ShapeMismatch {
        expected: format!("{}x{}", expected.0, expected.1),
        got: format!("{}x{}", got.0, got.1),
    }
}

fn check_same_shape(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<()> {
    if x.rep.shape() != y.rep.shape() {
        return Err(shape_mismatch(x.rep.shape(), y.rep.shape()));
    }
    Ok(())
}

/// Orthonormalizes an n x k matrix of full column rank into a point of
/// Gr(n,k), via thin QR with non-negative diagonal of R.
///
/// The returned representative spans the same column space as `m`. Fails
/// with `RankDeficient` if `sigma_min < 1e-10 sigma_max`.
pub fn make_point(m: &DMatrix<f64>) -> Result<GrassmannPoint> {
    let (n, k) = m.shape();
    if k == 0 || k >= n {
        return Err(Error::BadK { n, k });
    }
    let sigma = linalg::singular_values(m);
    let (smax, smin) = (sigma[0], sigma[k - 1]);
    if smin < RANK_TOL * smax || smax == 0.0 {
        return Err(Error::RankDeficient {
            ratio: if smax > 0.0 { smin / smax } else { 0.0 },
        });
    }
    let (q, _) = linalg::thin_qr(m);
    Ok(GrassmannPoint::from_orthonormal_unchecked(q))
}

/// Projects an arbitrary n x k matrix onto the tangent space at `x`:
/// G = (I - X X^T) M.
pub fn project_tangent(x: &GrassmannPoint, m: &DMatrix<f64>) -> Result<TangentVector> {
    if m.shape() != x.rep.shape() {
        return Err(shape_mismatch(x.rep.shape(), m.shape()));
    }
    let g = m - &x.rep * (x.rep.transpose() * m);
    Ok(TangentVector::new_unchecked(x, g))
}

/// Exponential map: follows the geodesic through `x` with initial velocity
/// `g` for unit time.
///
/// With the compact SVD G = U Sigma V^T (square Sigma and V), the image is
/// span(X V cos(Sigma) + U sin(Sigma)). The output is re-orthonormalized
/// through `make_point` so that representative drift cannot accumulate over
/// long solver runs.
pub fn exp_map(x: &GrassmannPoint, g: &TangentVector) -> Result<GrassmannPoint> {
    if g.mat.shape() != x.rep.shape() {
        return Err(shape_mismatch(x.rep.shape(), g.mat.shape()));
    }
    if g.norm() < ZERO_TANGENT_TOL {
        return Ok(x.clone());
    }
    let (u, sigma, v) = linalg::svd_thin(&g.mat);
    let k = x.k();
    let mut cos_s = DMatrix::zeros(k, k);
    let mut sin_s = DMatrix::zeros(k, k);
    for i in 0..k {
        cos_s[(i, i)] = sigma[i].cos();
        sin_s[(i, i)] = sigma[i].sin();
    }
    let image = &x.rep * &v * cos_s + u * sin_s;
    make_point(&image)
}

/// Logarithmic map: the tangent vector at `x` whose exponential reaches `y`.
///
/// Defined when X^T Y is invertible, i.e. all principal angles are strictly
/// below pi/2. With the compact SVD U Sigma V^T = (I - X X^T) Y (X^T Y)^{-1},
/// the result is U atan(Sigma) V^T.
pub fn log_map(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<TangentVector> {
    check_same_shape(x, y)?;
    let sxy = x.rep.transpose() * &y.rep;
    let sigma_min = linalg::singular_values(&sxy).last().copied().unwrap_or(0.0);
    if sigma_min <= INJECTIVITY_TOL {
        return Err(Error::NotInInjectivityDomain { sigma_min });
    }
    // (I - X X^T) Y (X^T Y)^{-1} = Y (X^T Y)^{-1} - X.
    let m = linalg::mul_inv_right(&y.rep, &sxy)
        .ok_or(Error::NotInInjectivityDomain { sigma_min })?
        - &x.rep;
    if m.norm() < ZERO_TANGENT_TOL {
        return Ok(TangentVector::zero(x));
    }
    let (u, sigma, v) = linalg::svd_thin(&m);
    let k = x.k();
    let mut atan_s = DMatrix::zeros(k, k);
    for i in 0..k {
        atan_s[(i, i)] = sigma[i].atan();
    }
    let g = u * atan_s * v.transpose();
    Ok(TangentVector::new_unchecked(x, g))
}

/// Principal angles from cosines (SVD of Y^T X, clamped to [0,1]) refined
/// by sines (SVD of (I - X X^T) Y) below pi/4, where acos alone cannot
/// resolve small angles: one ulp below sigma = 1 already maps to an angle
/// of 1.5e-8.
pub(crate) fn hybrid_angles(x: &GrassmannPoint, y: &GrassmannPoint) -> Vec<f64> {
    let k = x.k();
    let cosines = linalg::singular_values(&(y.rep.transpose() * &x.rep));
    let residual = &y.rep - &x.rep * (x.rep.transpose() * &y.rep);
    let mut sines = linalg::singular_values(&residual);
    sines.reverse(); // ascending, aligned with ascending angles
    (0..k)
        .map(|i| {
            let s = sines[i].clamp(0.0, 1.0);
            if s <= std::f64::consts::FRAC_1_SQRT_2 {
                s.asin()
            } else {
                linalg::acos_clamped(cosines[i])
            }
        })
        .collect()
}

/// Principal angles between `x` and `y` with the SVD factors of
/// Y^T X = U1 cos(theta) V1^T, angles ascending.
pub fn principal_angles(
    x: &GrassmannPoint,
    y: &GrassmannPoint,
) -> Result<PrincipalAngleDecomposition> {
    check_same_shape(x, y)?;
    let (u1, _, v1) = linalg::svd_thin(&(y.rep.transpose() * &x.rep));
    Ok(PrincipalAngleDecomposition {
        angles: hybrid_angles(x, y),
        left_factor: u1,
        right_factor: v1,
    })
}

/// Intrinsic (geodesic) distance: the l2 norm of the principal angles.
pub fn distance(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<f64> {
    check_same_shape(x, y)?;
    Ok(hybrid_angles(x, y)
        .iter()
        .map(|t| t * t)
        .sum::<f64>()
        .sqrt())
}

/// Largest principal angle theta_k between `x` and `y`.
pub fn largest_principal_angle(x: &GrassmannPoint, y: &GrassmannPoint) -> Result<f64> {
    check_same_shape(x, y)?;
    Ok(hybrid_angles(x, y).last().copied().unwrap_or(0.0))
}
