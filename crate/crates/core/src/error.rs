use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{what} is not hermitian (residual {residual:.3e})")]
    NotHermitian { what: String, residual: f64 },
    #[error("{what} is not unitary (residual {residual:.3e})")]
    NotUnitary { what: String, residual: f64 },
    #[error("{what} is not a projection (residual {residual:.3e})")]
    NotProjection { what: String, residual: f64 },
    #[error("{what} is not normalized (norm {norm})")]
    NotNormalized { what: String, norm: f64 },
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("empty or ragged data for {0}")]
    Shape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
