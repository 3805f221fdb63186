use thiserror::Error;

/// Errors raised by operator, channel and process-tensor construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate leg name `{0}`")]
    DuplicateLeg(String),

    #[error("unknown leg `{0}`")]
    UnknownLeg(String),

    #[error("leg `{0}` has invalid dimension 0")]
    ZeroDimension(String),

    #[error("leg order {0:?} is not a permutation of the operator's legs")]
    NotAPermutation(Vec<String>),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not Hermitian (‖M − M†‖_F = {0:e})")]
    NotHermitian(f64),

    #[error("operator is not unitary (‖U†U − 1‖_F = {0:e})")]
    NotUnitary(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("operator is not positive semidefinite (λ_min = {0:e})")]
    NotPositive(f64),

    #[error("channel is not invertible (condition number {0:e})")]
    NotInvertible(f64),

    #[error("incomplete instrument: {0}")]
    IncompleteInstrument(String),

    #[error("invalid process tensor: {0}")]
    InvalidProcessTensor(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}
