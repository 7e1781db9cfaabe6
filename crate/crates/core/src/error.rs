use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of a function.
    #[error("{func}: {reason}")]
    Domain { func: &'static str, reason: String },

    /// A scenario or parameter combination that the requested operation does not accept.
    #[error("invalid scenario: {0}")]
    Contract(String),

    /// A series hit its term cap before the neglected mass dropped below tolerance.
    #[error("series truncated after {terms} terms with neglected mass {bound:e}")]
    Truncation { terms: usize, bound: f64 },

    /// Quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: residual estimate {residual:e}")]
    Quadrature { residual: f64 },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }
}
