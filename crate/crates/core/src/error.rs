use thiserror::Error;

use crate::subset::Subset;

/// Errors raised by the measure, operator and check layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("negative or non-finite weight {weight} at face {face}")]
    NegativeWeight { face: usize, weight: f64 },
    #[error("{k} parts exceeds the configured maximum of {max}")]
    TooManyParts { k: usize, max: usize },
    #[error("assignment {0} has zero mass")]
    ZeroMassPoint(String),
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("family has a component for {0} but no witness h_S")]
    MissingWitness(Subset),
    #[error("|S| = {size} exceeds degree {degree}")]
    DegreeTooSmall { size: usize, degree: usize },
    #[error("function is not ({d}, {delta})-global: minimal delta is {delta_min}")]
    NotGlobal { d: usize, delta: f64, delta_min: f64 },
    #[error("function is not Boolean valued")]
    NotBoolean,
    #[error("delta {delta} exceeds the required ceiling {required}")]
    PreconditionDelta { delta: f64, required: f64 },
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
