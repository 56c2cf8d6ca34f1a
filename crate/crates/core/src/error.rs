use thiserror::Error;

use crate::cgs::CgsValidationError;
use crate::discount::DiscountError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("`{0}` is free in the formula but not bound by the assignment")]
    UnboundName(String),
    #[error("formula is not a sentence (free: {0})")]
    NotASentence(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("strategy `{name}`: {reason}")]
    InvalidStrategy { name: String, reason: String },
    #[error("formula is outside the supported fragment: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Arity(String),
    #[error("threshold {0} is outside [0,1]")]
    ThresholdRange(String),
    #[error(transparent)]
    Discount(#[from] DiscountError),
    #[error(transparent)]
    Model(#[from] CgsValidationError),
}

pub type Result<T> = std::result::Result<T, Error>;
