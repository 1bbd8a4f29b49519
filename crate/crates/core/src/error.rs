use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("subsystem label sets overlap on `{0}`")]
    OverlappingLabels(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not an isometry (deviation {0:e})")]
    NotIsometry(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("value out of domain: {0}")]
    OutOfDomain(String),

    #[error("strong subadditivity violated: conditional mutual information {0:e}")]
    SsaViolation(f64),

    #[error("source is not generic: {0}")]
    NotGeneric(String),

    #[error("dimension cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("malformed document: {0}")]
    Document(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
