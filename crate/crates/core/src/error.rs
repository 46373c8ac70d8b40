use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two kernels that must share a grid do not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The grid cuts off a non-negligible part of the kernel.
    #[error("grid truncates the kernel: edge value {edge:.3e} relative to peak (limit {limit:.1e})")]
    Truncation { edge: f64, limit: f64 },

    /// A correlation matrix failed a structural check (Hermiticity, sign of the diagonal).
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// An approximation evaluated outside the regime where it is meaningful.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// An iterative method did not converge or detected a bad bracket.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
