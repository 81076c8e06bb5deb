use thiserror::Error;

/// Errors produced by validation and numerical routines.
#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (max |A - A^H| entry = {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not 1 (got {trace:.12e})")]
    InvalidTrace { trace: f64 },

    #[error("state vector is not normalized (|psi|^2 = {norm_sq:.12e})")]
    NotNormalized { norm_sq: f64 },

    #[error("diagonal of correlation matrix deviates from 1 by {deviation:.3e}")]
    NotUnitDiagonal { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error(
        "SDP solver did not converge after {iterations} iterations (duality gap = {gap:.3e})"
    )]
    SolverNonConvergence {
        iterations: usize,
        gap: f64,
        best_value: f64,
    },

    #[error("mu_d undefined: diagonal entry {index} is zero but row/column is not")]
    SingularDiagonal { index: usize },

    #[error("verification suite '{0}' failed")]
    VerificationFailed(String),

    #[error("state file I/O failed: {0}")]
    Io(#[from] std::io::Error),

    #[error("state file parse failed: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CoherenceError>;
