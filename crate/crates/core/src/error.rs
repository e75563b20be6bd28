use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("edge probability {0} lies outside [0, 1]")]
    ProbabilityOutOfRange(String),

    #[error("probability denominator must be positive")]
    ZeroDenominator,

    #[error("index {index} is out of range for sequences of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("{what} is limited to {limit}, got {n}")]
    ResourceLimit { what: &'static str, n: u64, limit: u64 },

    #[error("cannot parse {0:?} as a rational of the form num/den")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
