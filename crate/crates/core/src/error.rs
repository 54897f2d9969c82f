use thiserror::Error;

use crate::model::Approximation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("index {requested} out of range for a reduct of length {length}")]
    Range { requested: usize, length: usize },

    #[error("approximation {0} is not valid for this instance")]
    InstanceMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("enumeration budget of {budget} exceeded ({what})")]
    Budget { budget: usize, what: String },

    #[error("no approximation of the truncation has {needed} one-step extensions after refinement")]
    TruncationTooShallow { needed: usize },

    #[error("fusion exhausted at stage {stage}")]
    Exhausted { stage: usize, partial: Approximation },

    #[error("no member of the inner family fits the coloring on any admissible reduct")]
    NoInnerWitness,

    #[error("malformed input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn mismatch(s: &Approximation) -> Self {
        Error::InstanceMismatch(s.to_string())
    }
}
