use thiserror::Error;

/// Errors reported by the geometry, objective, certificate and solver layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is numerically rank deficient: sigma_min/sigma_max = {ratio:.3e}")]
    RankDeficient { ratio: f64 },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("log map undefined: X^T Y is numerically singular (sigma_min = {sigma_min:.3e})")]
    NotInInjectivityDomain { sigma_min: f64 },

    #[error("matrix completion is not orthogonal: residual {residual:.3e}")]
    NotOrthogonal { residual: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("vector is not horizontal at the base point: |X^T G| = {residual:.3e}")]
    NotHorizontal { residual: f64 },

    #[error("invalid subspace dimension k = {k} for ambient dimension n = {n}")]
    BadK { n: usize, k: usize },

    #[error("largest principal angle is at the pi/2 boundary (theta_k = {theta:.6})")]
    AngleAtBoundary { theta: f64 },

    #[error("degenerate spectrum: gamma = {gamma:.3e} is numerically zero")]
    DegenerateSpectrum { gamma: f64 },

    #[error("epsilon must lie in [0, 1], got {0}")]
    BadEpsilon(f64),

    #[error("theorem hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("iterate lost rank during subspace iteration at step {step}")]
    RankCollapse { step: usize },

    #[error("trace was recorded without bound columns; rerun with record_bounds")]
    MissingBounds,

    #[error("step-size grid is empty")]
    EmptyGrid,

    #[error("matrix is not symmetric: |A - A^T| = {residual:.3e} relative")]
    NotSymmetric { residual: f64 },

    #[error("matrix is not positive semi-definite: lambda_min = {lambda_min:.3e}")]
    NotPositiveSemiDefinite { lambda_min: f64 },

    #[error("invalid spectrum: {0}")]
    BadSpectrum(String),
}

pub type Result<T> = std::result::Result<T, Error>;
