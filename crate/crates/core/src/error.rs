use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// `n_kernel_factor` is supported on `x > d` only.
    #[error("outside support: x = {x} must exceed d = {d}")]
    Support { x: f64, d: f64 },

    #[error(
        "quadrature did not converge{}: value {value:e}, error estimate {error_estimate:e} after {evaluations} evaluations",
        mode.map(|k| format!(" (Fourier mode k = {k})")).unwrap_or_default()
    )]
    Convergence {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
        mode: Option<i64>,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    /// Tags a convergence failure with the Fourier mode it occurred in.
    pub fn with_mode(self, k: i64) -> Self {
        match self {
            Error::Convergence {
                value,
                error_estimate,
                evaluations,
                ..
            } => Error::Convergence {
                value,
                error_estimate,
                evaluations,
                mode: Some(k),
            },
            other => other,
        }
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Convergence { .. })
    }
}
