//! CS block decomposition of a pair of subspaces with their orthogonal
//! complements, and the paired geodesics built from it.
//!
//! For orthonormal X, Y (n x k) with completions X_perp, Y_perp, the four
//! products Y^T X, Y^T X_perp, Y_perp^T X, Y_perp^T X_perp share CS factors
//! U1, V1 (k x k) and U2, V2 ((n-k) x (n-k)):
//!
//! ```text
//!  Y^T X      = U1 diag(I_r,  C_s, O_p) V1^T
//!  Y^T X_perp = U1 [O_{r x m}; S_s; I_p] V2^T
//!  Y_perp^T X = U2 [O_{m x r}; S_s; I_p] V1^T
//!  Y_perp^T X_perp = U2 diag(-I_m, -C_s, O_p) V2^T
//! ```
//!
//! with p = k - r - s, m = n - 2k + r, and C_s^2 + S_s^2 = I_s. The block
//! sizes split the principal angles into exact zeros (r), strictly interior
//! angles (s) and exact right angles (p), each at floating tolerance.

use crate::error::{Error, Result};
use crate::grassmann::{distance, make_point, GrassmannPoint};
use crate::linalg;
use nalgebra::DMatrix;
use std::f64::consts::FRAC_PI_2;

/// An angle counts as 0 (resp. pi/2) within this tolerance.
pub const ANGLE_BLOCK_TOL: f64 = 1e-9;

/// The four block factorizations shared by a pair of subspaces and their
/// complements.
#[derive(Clone, Debug)]
pub struct CsBlocks {
    /// Number of zero principal angles.
    pub r: usize,
    /// Number of strictly interior principal angles.
    pub s: usize,
    /// Number of right principal angles.
    pub p: usize,
    /// m = n - 2k + r.
    pub m: usize,
    /// Left factor of the k x k blocks.
    pub u1: DMatrix<f64>,
    /// Right factor acting on X.
    pub v1: DMatrix<f64>,
    /// Left factor of the (n-k) x (n-k) blocks.
    pub u2: DMatrix<f64>,
    /// Right factor acting on X_perp.
    pub v2: DMatrix<f64>,
    /// Cosines of the interior angles, strictly in (0,1), decreasing.
    pub cos_s: Vec<f64>,
    /// Sines of the interior angles, strictly in (0,1), increasing.
    pub sin_s: Vec<f64>,
    /// All k principal angles, ascending.
    pub angles: Vec<f64>,
}

impl CsBlocks {
    fn k(&self) -> usize {
        self.r + self.s + self.p
    }

    /// diag(I_r, C_s, O_p), the cosine matrix of Y^T X.
    pub fn block_11(&self) -> DMatrix<f64> {
        let k = self.k();
        let mut b = DMatrix::zeros(k, k);
        for i in 0..self.r {
            b[(i, i)] = 1.0;
        }
        for (i, &c) in self.cos_s.iter().enumerate() {
            b[(self.r + i, self.r + i)] = c;
        }
        b
    }

    /// [O_{r x m}; S_s; I_p], the k x (n-k) middle factor of Y^T X_perp.
    pub fn block_12(&self) -> DMatrix<f64> {
        let k = self.k();
        let nk = self.m + self.s + self.p;
        let mut b = DMatrix::zeros(k, nk);
        for (i, &s) in self.sin_s.iter().enumerate() {
            b[(self.r + i, self.m + i)] = s;
        }
        for i in 0..self.p {
            b[(self.r + self.s + i, self.m + self.s + i)] = 1.0;
        }
        b
    }

    /// [O_{m x r}; S_s; I_p], the (n-k) x k middle factor of Y_perp^T X.
    pub fn block_21(&self) -> DMatrix<f64> {
        self.block_12().transpose()
    }

    /// diag(-I_m, -C_s, O_p), the (n-k) x (n-k) middle factor of
    /// Y_perp^T X_perp.
    pub fn block_22(&self) -> DMatrix<f64> {
        let nk = self.m + self.s + self.p;
        let mut b = DMatrix::zeros(nk, nk);
        for i in 0..self.m {
            b[(i, i)] = -1.0;
        }
        for (i, &c) in self.cos_s.iter().enumerate() {
            b[(self.m + i, self.m + i)] = -c;
        }
        b
    }
}

fn check_completion(basis: &DMatrix<f64>, completion: &DMatrix<f64>) -> Result<()> {
    let n = basis.nrows();
    let k = basis.ncols();
    if completion.shape() != (n, n - k) {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{}", n, n - k),
            got: format!("{}x{}", completion.nrows(), completion.ncols()),
        });
    }
    let mut q = DMatrix::zeros(n, n);
    q.view_mut((0, 0), (n, k)).copy_from(basis);
    q.view_mut((0, k), (n, n - k)).copy_from(completion);
    let residual = linalg::orthonormality_residual(&q);
    if residual > 1e-10 {
        return Err(Error::NotOrthogonal { residual });
    }
    Ok(())
}

/// One modified Gram-Schmidt pass; columns are assumed near-orthonormal.
fn mgs_polish(m: &mut DMatrix<f64>) {
    for j in 0..m.ncols() {
        for i in 0..j {
            let proj = m.column(i).dot(&m.column(j));
            let col_i = m.column(i).into_owned();
            let mut col_j = m.column_mut(j);
            col_j.axpy(-proj, &col_i, 1.0);
        }
        let norm = m.column(j).norm();
        if norm > 0.0 {
            m.column_mut(j).scale_mut(1.0 / norm);
        }
    }
}

/// Computes the CS block decomposition of Lemma-style square blocks for the
/// orthogonal matrix [Y Y_perp]^T [X X_perp].
///
/// Both completions are validated to form orthogonal n x n matrices at
/// tolerance 1e-10.
pub fn cs_blocks(
    x: &GrassmannPoint,
    x_perp: &DMatrix<f64>,
    y: &GrassmannPoint,
    y_perp: &DMatrix<f64>,
) -> Result<CsBlocks> {
    let (n, k) = (x.n(), x.k());
    if y.n() != n || y.k() != k {
        return Err(Error::ShapeMismatch {
            expected: format!("{n}x{k}"),
            got: format!("{}x{}", y.n(), y.k()),
        });
    }
    check_completion(x.representative(), x_perp)?;
    check_completion(y.representative(), y_perp)?;

    let a11 = y.representative().transpose() * x.representative();
    let a12 = y.representative().transpose() * x_perp;
    let a21 = y_perp.transpose() * x.representative();
    let a22 = y_perp.transpose() * x_perp;

    // Cosines of the angles come from the (1,1) block, sines from the (2,1)
    // block; each is well conditioned on its own side of pi/4, and the zero
    // and right-angle counts need the well-conditioned end.
    let (u1, sigma, v1) = linalg::svd_thin(&a11);
    let angles = crate::grassmann::hybrid_angles(x, y);

    let r = angles.iter().filter(|&&t| t < ANGLE_BLOCK_TOL).count();
    let p = angles
        .iter()
        .filter(|&&t| t > FRAC_PI_2 - ANGLE_BLOCK_TOL)
        .count();
    let s_cnt = k - r - p;
    let m = (n as isize - 2 * k as isize + r as isize)
        .try_into()
        .map_err(|_| {
            Error::PreconditionViolated(format!(
                "angle classification gives negative m = n - 2k + r with n={n}, k={k}, r={r}"
            ))
        })?;
    debug_assert!(angles
        .iter()
        .zip(sigma.iter())
        .all(|(t, s)| (t.cos() - s.clamp(0.0, 1.0)).abs() < 1e-12));

    let cos_s: Vec<f64> = angles[r..r + s_cnt].iter().map(|t| t.cos()).collect();
    let sin_s: Vec<f64> = angles[r..r + s_cnt].iter().map(|t| t.sin()).collect();

    // Columns of A21 V1 are orthogonal with norms sin(theta_i); the interior
    // and right-angle ones determine U2's trailing columns. Same for the
    // rows of U1^T A12 and V2.
    let b = &a21 * &v1;
    let d = u1.transpose() * &a12;
    let nk = n - k;
    let mut u_sp = DMatrix::zeros(nk, s_cnt + p);
    let mut v_sp = DMatrix::zeros(nk, s_cnt + p);
    for i in 0..s_cnt + p {
        let col = b.column(r + i);
        let row = d.row(r + i).transpose();
        let (cn, rn) = (col.norm(), row.norm());
        u_sp.set_column(i, &(col / cn));
        v_sp.set_column(i, &(row / rn));
    }
    mgs_polish(&mut u_sp);
    mgs_polish(&mut v_sp);

    // Leading m columns: complete V2 arbitrarily, then U2 follows from
    // U2^T A22 V2 = diag(-I_m, ...), i.e. U2_m = -A22 V2_m.
    let v2_lead = linalg::orthonormal_completion(&v_sp);
    let u2_lead = -(&a22 * &v2_lead);

    let mut u2 = DMatrix::zeros(nk, nk);
    let mut v2 = DMatrix::zeros(nk, nk);
    u2.view_mut((0, 0), (nk, m)).copy_from(&u2_lead);
    u2.view_mut((0, m), (nk, s_cnt + p)).copy_from(&u_sp);
    v2.view_mut((0, 0), (nk, m)).copy_from(&v2_lead);
    v2.view_mut((0, m), (nk, s_cnt + p)).copy_from(&v_sp);
    mgs_polish(&mut u2);
    mgs_polish(&mut v2);

    Ok(CsBlocks {
        r,
        s: s_cnt,
        p,
        m,
        u1,
        v1,
        u2,
        v2,
        cos_s,
        sin_s,
        angles,
    })
}

/// Evaluates the connecting geodesic from span(X) to span(Y) and the paired
/// geodesic between their complements at parameter `t` in [0, 1].
///
/// Returns orthonormal matrices (gamma(t), gamma_perp(t)) with
/// gamma(t)^T gamma_perp(t) = 0. Requires `k <= n/2` and largest principal
/// angle strictly below pi/2.
pub fn geodesic_pair(
    x: &GrassmannPoint,
    x_perp: &DMatrix<f64>,
    y: &GrassmannPoint,
    y_perp: &DMatrix<f64>,
    t: f64,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (n, k) = (x.n(), x.k());
    if 2 * k > n {
        return Err(Error::PreconditionViolated(format!(
            "paired geodesics require k <= n/2, got n={n}, k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::PreconditionViolated(format!(
            "geodesic parameter must lie in [0,1], got {t}"
        )));
    }
    let cs = cs_blocks(x, x_perp, y, y_perp)?;
    if cs.p > 0 {
        return Err(Error::PreconditionViolated(
            "largest principal angle is at pi/2; the connecting geodesic is not unique".into(),
        ));
    }

    let nk = n - k;
    let xv1 = x.representative() * &cs.v1;
    let v2_tail = cs.v2.columns(nk - k, k).into_owned();
    let xp_v2_tail = x_perp * v2_tail;

    let mut cos_t = DMatrix::zeros(k, k);
    let mut sin_t = DMatrix::zeros(k, k);
    for (i, &theta) in cs.angles.iter().enumerate() {
        cos_t[(i, i)] = (t * theta).cos();
        sin_t[(i, i)] = (t * theta).sin();
    }

    let gamma = &xv1 * &cos_t + &xp_v2_tail * &sin_t;

    let mut gamma_perp = DMatrix::zeros(n, nk);
    if nk > k {
        let v2_lead = cs.v2.columns(0, nk - k).into_owned();
        gamma_perp
            .view_mut((0, 0), (n, nk - k))
            .copy_from(&(x_perp * v2_lead));
    }
    gamma_perp
        .view_mut((0, nk - k), (n, k))
        .copy_from(&(&xp_v2_tail * &cos_t - &xv1 * &sin_t));

    Ok((gamma, gamma_perp))
}

/// Distance between the span of a raw orthonormal matrix and a reference
/// subspace; convenience for geodesic consistency checks.
pub fn span_distance(gamma: &DMatrix<f64>, reference: &GrassmannPoint) -> Result<f64> {
    let p = make_point(gamma)?;
    distance(&p, reference)
}
