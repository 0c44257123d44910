use thiserror::Error;

#[derive(Debug, Error)]
pub enum BeurlingError {
    #[error("a classical system needs limit >= 2 (got {0}); use an explicit empty list for a system without primes")]
    EmptySystem(String),

    #[error("{what} = {value} is beyond the available range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: String,
        limit: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("enumeration needs more than {estimated} elements, above the memory cap of {cap}")]
    Resource { estimated: u64, cap: u64 },

    #[error("arithmetic overflow in exact rational computation: {0}")]
    Overflow(String),

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl BeurlingError {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        limit: impl ToString,
    ) -> Self {
        BeurlingError::OutOfRange {
            what,
            value: value.to_string(),
            limit: limit.to_string(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        BeurlingError::Invalid(msg.into())
    }
}

pub type Result<T, E = BeurlingError> = std::result::Result<T, E>;
