//! Dense linear-algebra kernels used by the rest of the crate.
//!
//! Symmetric eigendecomposition and LU solves are delegated to nalgebra.
//! The SVD is a hand-rolled one-sided Jacobi: nalgebra's bidiagonal SVD
//! returns factorizations with reconstruction errors up to 1e-2 on exactly
//! rank-deficient inputs, and rank-deficient matrices are structural here
//! (every horizontal vector has rank <= min(k, n-k)). Jacobi is backward
//! stable, deterministic, computes tiny singular values to high relative
//! accuracy, and all matrices are small. QR is a hand-rolled Householder
//! factorization because we need the full square Q (for orthonormal
//! completions) with a deterministic sign convention.

use nalgebra::{DMatrix, DVector};

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
///
/// Returns `(eigenvalues, eigenvectors)` where column `i` of the eigenvector
/// matrix corresponds to `eigenvalues[i]`.
pub fn sym_eigen_desc(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eigen_desc requires a square matrix");
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// One-sided Jacobi: orthogonalizes the columns of `w` by plane rotations,
/// accumulating them into `v` when given. On return the columns of `w` are
/// mutually orthogonal; their norms are the singular values.
fn jacobi_orthogonalize(w: &mut DMatrix<f64>, mut v: Option<&mut DMatrix<f64>>) {
    let (n, k) = w.shape();
    let tol = f64::EPSILON;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..n {
                    alpha += w[(i, p)] * w[(i, p)];
                    beta += w[(i, q)] * w[(i, q)];
                    gamma += w[(i, p)] * w[(i, q)];
                }
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
                if let Some(v) = v.as_deref_mut() {
                    for i in 0..k {
                        let (vp, vq) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = c * vp - s * vq;
                        v[(i, q)] = s * vp + c * vq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Thin SVD `A = U diag(sigma) V^T` of an `n x k` matrix with `n >= k`,
/// by one-sided Jacobi. `U` is `n x k`, `V` is `k x k`, singular values
/// sorted descending. Columns of `U` belonging to zero singular values are
/// filled with an orthonormal completion.
pub fn svd_thin(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (n, k) = a.shape();
    assert!(n >= k, "svd_thin requires n >= k, got {n} x {k}");
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(k, k);
    jacobi_orthogonalize(&mut w, Some(&mut v));

    let norms: Vec<f64> = (0..k).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut sigma = Vec::with_capacity(k);
    let mut u = DMatrix::zeros(n, k);
    let mut v_sorted = DMatrix::zeros(k, k);
    let mut degenerate = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        sigma.push(norms[src]);
        v_sorted.set_column(dst, &v.column(src));
        if norms[src] > f64::MIN_POSITIVE.sqrt() {
            u.set_column(dst, &(w.column(src) / norms[src]));
        } else {
            degenerate.push(dst);
        }
    }
    if !degenerate.is_empty() {
        let lead = k - degenerate.len();
        let fill = orthonormal_completion(&u.columns(0, lead).into_owned());
        for (i, &dst) in degenerate.iter().enumerate() {
            u.set_column(dst, &fill.column(i));
        }
    }
    (u, sigma, v_sorted)
}

/// Singular values only, descending (one-sided Jacobi on the columns).
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let (n, k) = a.shape();
    let mut w = if n >= k { a.clone() } else { a.transpose() };
    jacobi_orthogonalize(&mut w, None);
    let mut sigma: Vec<f64> = (0..w.ncols()).map(|j| w.column(j).norm()).collect();
    sigma.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sigma
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Full Householder QR factorization `A = Q R` of an `n x k` matrix, `k <= n`.
///
/// `Q` is `n x n` orthogonal, `R` is `n x k` upper triangular with
/// non-negative diagonal (signs are folded into the first `k` columns of `Q`).
pub fn full_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, k) = a.shape();
    assert!(k <= n, "full_qr requires k <= n, got {n} x {k}");
    let mut r = a.clone();
    let mut q = DMatrix::<f64>::identity(n, n);

    for j in 0..k.min(n.saturating_sub(1)) {
        let mut v = DVector::<f64>::zeros(n - j);
        for i in j..n {
            v[i - j] = r[(i, j)];
        }
        let norm = v.norm();
        if norm < f64::MIN_POSITIVE {
            continue;
        }
        let alpha = -v[0].signum() * norm;
        v[0] -= alpha;
        let vn2 = v.norm_squared();
        if vn2 < f64::MIN_POSITIVE {
            continue;
        }
        // R <- H R on rows j.., Q <- Q H on columns j.. with H = I - 2vv^T/vn2.
        for c in j..k {
            let mut dot = 0.0;
            for i in j..n {
                dot += v[i - j] * r[(i, c)];
            }
            let s = 2.0 * dot / vn2;
            for i in j..n {
                r[(i, c)] -= s * v[i - j];
            }
        }
        for row in 0..n {
            let mut dot = 0.0;
            for i in j..n {
                dot += q[(row, i)] * v[i - j];
            }
            let s = 2.0 * dot / vn2;
            for i in j..n {
                q[(row, i)] -= s * v[i - j];
            }
        }
        r[(j, j)] = alpha;
        for i in (j + 1)..n {
            r[(i, j)] = 0.0;
        }
    }

    for j in 0..k {
        if r[(j, j)] < 0.0 {
            for c in j..k {
                r[(j, c)] = -r[(j, c)];
            }
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    (q, r)
}

/// Thin QR: first `k` columns of Q and the square upper-triangular R block.
pub fn thin_qr(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (n, k) = a.shape();
    let (q, r) = full_qr(a);
    (
        q.columns(0, k).into_owned(),
        r.view((0, 0), (k.min(n), k)).into_owned(),
    )
}

/// Orthonormal basis of the orthogonal complement of the column span of `u`,
/// where `u` is `n x j` with orthonormal columns. Returns an `n x (n-j)`
/// matrix from the trailing columns of the full QR of `u`.
pub fn orthonormal_completion(u: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, j) = u.shape();
    assert!(j <= n);
    let (q, _) = full_qr(u);
    q.columns(j, n - j).into_owned()
}

/// `B A^{-1}` via an LU solve of `A^T W = B^T`. Returns `None` if `A` is
/// exactly singular for the LU factorization.
pub fn mul_inv_right(b: &DMatrix<f64>, a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let lu = a.transpose().lu();
    lu.solve(&b.transpose()).map(|w| w.transpose())
}

/// Frobenius distance of `m^T m` from the identity.
pub fn orthonormality_residual(m: &DMatrix<f64>) -> f64 {
    let k = m.ncols();
    (m.transpose() * m - DMatrix::<f64>::identity(k, k)).norm()
}

/// `acos` of a value clamped to [0, 1]; guards against floating-point
/// overshoot of singular values.
pub fn acos_clamped(x: f64) -> f64 {
    x.clamp(0.0, 1.0).acos()
}
