//! Grassmann-manifold geometry and a block Rayleigh quotient eigensolver.
//!
//! The crate computes the k-dimensional leading eigenspace of a symmetric
//! positive semi-definite matrix by Riemannian steepest descent on Gr(n,k),
//! and ships a certificate engine that numerically verifies the
//! convexity-like inequalities and convergence bounds the solver relies on.
//!
//! Modules:
//! - [`grassmann`]: points, tangents, exp/log, principal angles, distance,
//!   CS block decomposition and paired geodesics.
//! - [`rayleigh`]: the objective f(X) = -Tr(X^T A X), its Riemannian
//!   gradient, Hessian quadratic form and Kronecker Hessian matrix.
//! - [`certificates`]: numerical verification of weak-quasi-convexity,
//!   quadratic growth, weak-strong convexity, gradient dominance, smoothness
//!   descent, the geodesic convexity radius and an explicit
//!   counterexample to a prior convexity claim.
//! - [`solvers`]: Riemannian steepest descent with the admissible step rules,
//!   a subspace-iteration baseline and bound-verification monitors.
//! - [`sampling`]: seeded random problems, points and tangents for tests and
//!   sweeps.

pub mod certificates;
pub mod error;
pub mod grassmann;
pub mod linalg;
pub mod rayleigh;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
