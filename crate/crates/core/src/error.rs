use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown strategy label `{0}`")]
    UnknownLabel(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("random variables live on different sample spaces")]
    MismatchedSpace,
    #[error("variable `{0}` is not binary-valued")]
    NonBinary(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("state vector is zero")]
    ZeroVector,
    #[error("`{0}` is not a member of the closed strategy set")]
    Membership(String),
    #[error("invalid strategy parameter: {0}")]
    InvalidParameter(String),
    #[error("operation requires the rotation family")]
    FamilyKind,
    #[error("strategy bijection mismatch: {0}")]
    BijectionMismatch(String),
    #[error("validation failure: {0}")]
    ValidationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
