use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("price ladder: {0}")]
    PriceLadder(String),

    #[error("branch `{branch}`: {reason}")]
    Branch { branch: String, reason: String },

    #[error("priority order: {0}")]
    Priority(String),

    #[error("price responsiveness policy: {0}")]
    Policy(String),

    #[error("tier partition: {0}")]
    Tiers(String),

    #[error("scoring rule: {0}")]
    Scoring(String),

    #[error("preference relation of cadet {cadet}: {reason}")]
    Preference { cadet: usize, reason: String },

    #[error("allocation: {0}")]
    Allocation(String),

    #[error("choice rule input: {0}")]
    ChoiceInput(String),

    #[error("mechanism `{mechanism}` not applicable: {reason}")]
    Unsupported { mechanism: &'static str, reason: String },

    #[error("enumeration of {what} would visit {count} items, above the guard of {limit}")]
    GuardExceeded { what: String, count: u128, limit: u128 },

    #[error("{field}: {reason}")]
    Schema { field: String, reason: String },

    #[error("I/O: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
