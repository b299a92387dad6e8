use thiserror::Error;

/// Errors raised by the measurement model and its numerical machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    #[error("quadrature did not converge (estimate {estimate}, error {error:e})")]
    Convergence { estimate: f64, error: f64 },

    #[error("degenerate post-selection: success probability {probability:e}")]
    DegeneratePostselection { probability: f64 },

    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    #[error("Fock truncation too short: z^n_max = {residual:e}, need n_max >= {required}")]
    Precision { required: usize, residual: f64 },

    #[error("model error: {0}")]
    Model(String),

    #[error("non-finite value: {0}")]
    Numeric(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
