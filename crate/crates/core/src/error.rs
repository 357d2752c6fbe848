use thiserror::Error;

pub type Result<T> = std::result::Result<T, IqaeError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IqaeError {
    /// An argument fell outside the domain of the operation that received it.
    #[error("{name} = {value} is outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The engine ran `rounds` rounds without meeting the termination criterion.
    #[error("round limit exceeded after {rounds} rounds")]
    RoundLimitExceeded { rounds: usize },
}

impl IqaeError {
    pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Self {
        IqaeError::Domain {
            name,
            value,
            expected,
        }
    }
}
