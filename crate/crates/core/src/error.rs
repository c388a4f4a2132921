use thiserror::Error;

use crate::diophantine::Lemma8Solution;
use crate::instance::Sign;
use crate::witness::WitnessReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// The requested enumeration is larger than the configured budget.
    #[error("{what}: search space of {required} exceeds budget {budget}")]
    Budget {
        what: &'static str,
        required: u128,
        budget: u64,
    },

    /// A search that must succeed came back empty.
    #[error("theorem violation for sign {sign}: no outside prime found")]
    TheoremViolation {
        sign: Sign,
        report: Box<WitnessReport>,
    },

    /// A bounded scan produced a solution outside the claimed classification.
    #[error("lemma violation: {} solution(s) escape the classification", violations.len())]
    LemmaViolation {
        solutions: Vec<Lemma8Solution>,
        violations: Vec<Lemma8Solution>,
    },

    /// An internal consistency check failed.
    #[error("invariant failed: {0}")]
    Invariant(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
