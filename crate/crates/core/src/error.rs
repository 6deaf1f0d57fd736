use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not enough data for {context}: have {have}, need at least {need}")]
    InsufficientData {
        context: &'static str,
        have: usize,
        need: usize,
    },

    /// A descriptor column has zero spread and cannot be scaled.
    #[error("descriptor column {column} is constant; cannot scale")]
    DegenerateColumn { column: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No residual covariance between predictors and response; the
    /// partial least squares pass cannot extract another component.
    #[error("zero predictor/response covariance at component {component}")]
    ZeroWeight { component: usize },

    /// Every regression weight was clamped; the caller should fall back
    /// to an unweighted fit.
    #[error("all regression weights degenerate")]
    AllWeightsDegenerate,

    #[error("normal equations singular (ridge retry failed)")]
    SingularNormalEquations,

    /// The polynomial collapsed to the zero constant after trimming.
    #[error("polynomial is identically zero")]
    IdenticallyZero,

    #[error("empty interval")]
    EmptyInterval,

    #[error("unknown model id `{0}`")]
    UnknownModelId(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("measurement source failed: {0}")]
    OracleFailure(String),

    #[error("state file corrupt: {0}")]
    StateCorrupt(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
