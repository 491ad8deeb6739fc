use thiserror::Error;

/// Errors raised by model validation, geometric evaluation and the prior/Bayes machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input rejected by the admissible-domain checks. `field` names the offending entry.
    #[error("invalid `{field}`: {message}")]
    Domain { field: String, message: String },

    #[error("point has {got} coordinates, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The gain h_0 varies with the parameters, so the geometry is not Kähler.
    #[error("model is not Kähler: gain h_0 depends on the parameters (max |Δη_0| = {max_deviation:.3e})")]
    NonKahler { max_deviation: f64 },

    #[error("operation requires an ARFIMA/ARMA model: {0}")]
    UnsupportedKind(String),

    /// A finite-difference stencil could not be evaluated.
    #[error("finite differences failed: {0}")]
    FiniteDifference(String),

    #[error("metric is singular or not positive definite at the requested point")]
    SingularMetric,

    #[error("prior bound violated: kappa = {kappa} >= u* = {u_star} at point {point}")]
    BoundViolation { kappa: f64, u_star: f64, point: String },

    #[error("invalid prior specification: {0}")]
    InvalidPrior(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Domain {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
