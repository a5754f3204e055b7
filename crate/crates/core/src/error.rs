use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tap count {0}: a filter needs at least one tap")]
    InvalidTapCount(usize),

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("signal too short: {n} samples for a {m}-tap filter")]
    SignalTooShort { n: usize, m: usize },

    #[error("empty signal")]
    EmptySignal,

    #[error("malformed plan: {0}")]
    MalformedPlan(String),

    #[error("plan json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
