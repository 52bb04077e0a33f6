use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input document or value failed validation; `location` names the field.
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },

    #[error("policy has {found} turns but the instance has {expected} items")]
    PolicyLength { expected: usize, found: usize },

    #[error("agent index {index} out of range for {n_agents} agents")]
    InvalidAgent { index: usize, n_agents: usize },

    #[error("allocation covers {found} items but the instance has {expected}")]
    AllocationMismatch { expected: usize, found: usize },

    #[error("{items} items are not a multiple of {agents} agents")]
    Divisibility { items: usize, agents: usize },

    #[error("search space of {size} exceeds the guard of {guard}")]
    GuardExceeded { size: String, guard: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no polynomial algorithm for {0}")]
    NoExactAlgorithm(String),

    /// A solver's witness failed re-simulation. Always a bug.
    #[error("witness verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn guard(size: Option<u128>, guard: u64) -> Self {
        Error::GuardExceeded {
            size: size.map_or_else(|| "more than 2^128".to_string(), |s| s.to_string()),
            guard,
        }
    }
}
