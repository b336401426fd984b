use nepswalk_oracle::OracleError;

use crate::exactnum::ArithError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A spec failed validation; `field` names the offending JSON path.
    #[error("{field}: {message}")]
    InvalidSpec { field: String, message: String },
    #[error("malformed spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("graph has {vertices} vertices, above the dense limit of {limit}")]
    DenseLimit { vertices: usize, limit: usize },
    #[error("search bound exhausted: {0}")]
    SearchBound(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
