//! The block Rayleigh quotient f(X) = -Tr(X^T A X) on Gr(n,k) for a
//! symmetric positive semi-definite A: spectra, values, Riemannian gradient,
//! Hessian quadratic form and the Kronecker matrix representation of the
//! Hessian.

use crate::error::{Error, Result};
use crate::grassmann::{GrassmannPoint, TangentVector};
use crate::linalg;
use nalgebra::DMatrix;

/// Relative tolerance for the symmetry check at construction.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// A spectrum counts as degenerate when gamma < 1e-12 lambda_1.
pub const DEGENERATE_GAMMA_TOL: f64 = 1e-12;

/// A validated symmetric positive semi-definite matrix.
#[derive(Clone, Debug)]
pub struct SymmetricPSDMatrix {
    entries: DMatrix<f64>,
}

impl SymmetricPSDMatrix {
    /// Validates symmetry (`|A - A^T| <= 1e-10 |A|`) and positive
    /// semi-definiteness (`lambda_min >= -1e-10 |lambda_max|`).
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (n, m) = entries.shape();
        if n != m {
            return Err(Error::ShapeMismatch {
                expected: format!("{n}x{n}"),
                got: format!("{n}x{m}"),
            });
        }
        let scale = entries.norm();
        let asym = (&entries - entries.transpose()).norm();
        if scale > 0.0 && asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric {
                residual: asym / scale,
            });
        }
        let (values, _) = linalg::sym_eigen_desc(&entries);
        let lambda_max = values[0];
        let lambda_min = values[n - 1];
        if lambda_min < -1e-10 * lambda_max.abs() {
            return Err(Error::NotPositiveSemiDefinite { lambda_min });
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// A X for an n x k block X.
    pub fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.entries * x
    }
}

/// Sorted eigendecomposition of A split at position k, with the derived
/// constants the convergence theory is phrased in.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// lambda_1 >= ... >= lambda_n, counted with multiplicity.
    pub eigenvalues: Vec<f64>,
    /// V_alpha: the k leading eigenvectors (the backend's choice when the
    /// eigengap vanishes; the minimizer is then not unique).
    pub leading_block: GrassmannPoint,
    /// V_beta: the n-k trailing eigenvectors.
    pub trailing_block: GrassmannPoint,
    /// delta = lambda_k - lambda_{k+1}.
    pub eigengap: f64,
    /// gamma = 2 (lambda_1 - lambda_n), the smoothness constant.
    pub smoothness: f64,
    /// f* = -(lambda_1 + ... + lambda_k), the global minimum of f.
    pub f_star: f64,
    k: usize,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.eigengap
    }

    pub fn gamma(&self) -> f64 {
        self.smoothness
    }

    /// True when the minimizer is not unique (delta vanishes relative to
    /// lambda_1), so V_alpha is one of many leading eigenspaces.
    pub fn is_gap_degenerate(&self) -> bool {
        self.eigengap <= DEGENERATE_GAMMA_TOL * self.eigenvalues[0].abs()
    }

    /// True when gamma is numerically zero (A is a multiple of the
    /// identity and every subspace is optimal).
    pub fn is_gamma_degenerate(&self) -> bool {
        self.smoothness <= DEGENERATE_GAMMA_TOL * self.eigenvalues[0].abs()
    }
}

/// Full symmetric eigendecomposition of A in descending order, split at k.
pub fn spectral_data(a: &SymmetricPSDMatrix, k: usize) -> Result<SpectralData> {
    let n = a.n();
    if k == 0 || k >= n {
        return Err(Error::BadK { n, k });
    }
    let (values, vectors) = linalg::sym_eigen_desc(a.entries());
    let leading = vectors.columns(0, k).into_owned();
    let trailing = vectors.columns(k, n - k).into_owned();
    let eigengap = values[k - 1] - values[k];
    let smoothness = 2.0 * (values[0] - values[n - 1]);
    let f_star = -values[..k].iter().sum::<f64>();
    Ok(SpectralData {
        eigenvalues: values,
        leading_block: GrassmannPoint::from_orthonormal(leading)?,
        trailing_block: GrassmannPoint::from_orthonormal(trailing)?,
        eigengap,
        smoothness,
        f_star,
        k,
    })
}

fn check_shapes(a: &SymmetricPSDMatrix, x: &GrassmannPoint) -> Result<()> {
    if x.n() != a.n() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", a.n(), x.k()),
            got: format!("{}x{}", x.n(), x.k()),
        });
    }
    Ok(())
}

/// f(X) = -Tr(X^T A X); invariant under X -> XQ.
pub fn f_value(a: &SymmetricPSDMatrix, x: &GrassmannPoint) -> Result<f64> {
    check_shapes(a, x)?;
    let ax = a.apply(x.representative());
    Ok(-x.representative().dot(&ax))
}

/// Riemannian gradient grad f(X) = -2 (I - X X^T) A X; vanishes exactly at
/// the invariant subspaces of A.
pub fn riemannian_gradient(a: &SymmetricPSDMatrix, x: &GrassmannPoint) -> Result<TangentVector> {
    check_shapes(a, x)?;
    let xr = x.representative();
    let ax = a.apply(xr);
    let g = -2.0 * (&ax - xr * (xr.transpose() * &ax));
    Ok(TangentVector::new_unchecked(x, g))
}

/// Hessian quadratic form Hess f(X)[G,G] = 2 <G, G X^T A X - A G> for a
/// horizontal G.
pub fn hessian_quadratic_form(
    a: &SymmetricPSDMatrix,
    x: &GrassmannPoint,
    g: &TangentVector,
) -> Result<f64> {
    check_shapes(a, x)?;
    let gm = g.matrix();
    if gm.shape() != x.representative().shape() {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", x.n(), x.k()),
            got: format!("{}x{}", gm.nrows(), gm.ncols()),
        });
    }
    let residual = (x.representative().transpose() * gm).norm();
    if residual > 1e-10 * (1.0 + gm.norm()) {
        return Err(Error::NotHorizontal { residual });
    }
    let xr = x.representative();
    let xax = xr.transpose() * a.apply(xr);
    let term1 = gm.dot(&(gm * xax));
    let term2 = gm.dot(&a.apply(gm));
    Ok(2.0 * (term1 - term2))
}

/// Matrix representation of the Riemannian Hessian in the orthonormal basis
/// I_k (x) X_perp of the vectorized tangent space:
///
/// ```text
/// H_X = 2 (X^T A X (x) I_{n-k}  -  I_k (x) X_perp^T A X_perp)
/// ```
///
/// Vectorization is column-stacking of the (n-k) x k coordinate matrix M of
/// G = X_perp M, so that vec(M)^T H_X vec(M) equals the Hessian quadratic
/// form at G. The k(n-k) eigenvalues are exactly
/// 2 (lambda_i(X^T A X) - lambda_j(X_perp^T A X_perp)).
pub fn hessian_matrix(a: &SymmetricPSDMatrix, x: &GrassmannPoint) -> Result<DMatrix<f64>> {
    check_shapes(a, x)?;
    let (n, k) = (x.n(), x.k());
    let xr = x.representative();
    let x_perp = x.complement();
    let xax = xr.transpose() * a.apply(xr);
    let pap = x_perp.transpose() * a.apply(&x_perp);
    let h = xax.kronecker(&DMatrix::identity(n - k, n - k))
        - DMatrix::identity(k, k).kronecker(&pap);
    let h = 2.0 * h;
    Ok((&h + h.transpose()) * 0.5)
}
