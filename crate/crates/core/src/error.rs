use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateauxError {
    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("operation requires a nonzero matrix")]
    ZeroMatrix,

    #[error("operation requires a nonzero function")]
    ZeroFunction,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("cutoff eps = {eps} must be smaller than the operator norm {norm}")]
    EpsTooLarge { eps: f64, norm: f64 },

    #[error("delta = {delta} must be smaller than the sup norm {norm}")]
    DeltaTooLarge { delta: f64, norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("subspace must have at least one generator")]
    EmptySubspace,

    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("state is not norm-attaining: tr(A*A T) deviates from |A|^2 by {deviation:.3e}")]
    NotAMaximizer { deviation: f64 },

    /// The feasibility solver produced neither a witness nor a separating
    /// certificate. Never reported as a verdict.
    #[error(
        "indeterminate after {iterations} iterations \
         (objective {objective:.3e}, lower bound {lower_bound:.3e})"
    )]
    Indeterminate {
        iterations: usize,
        objective: f64,
        lower_bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, GateauxError>;
