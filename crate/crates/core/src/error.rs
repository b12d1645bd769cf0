use alloc::string::String;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A special function or propagator was handed a value outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("missing required field `{0}`")]
    MissingField(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The requested quadrature would alias the oscillatory integrand.
    #[error(
        "under-resolved quadrature for {context}: {requested} points requested, \
         at least {required} required"
    )]
    UnderSampled {
        context: &'static str,
        requested: usize,
        required: usize,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("cannot estimate correlations: {0}")]
    Estimation(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// `true` for refusals issued by the sampling planner.
    pub fn is_numerical_refusal(&self) -> bool {
        matches!(self, Error::UnderSampled { .. })
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(name, alloc::format!("must be finite, got {value}")))
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(name, alloc::format!("must be > 0, got {value}")))
    }
}
