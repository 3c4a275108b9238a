//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("functor `{0}` has not passed tautness verification")]
    NotTautVerified(String),
    #[error("transformation `{0}` has not passed tautness verification")]
    TransfNotTautVerified(String),
    #[error("transformation `{0}` is not taut: {1}")]
    NotTaut(String, String),
    #[error("map is not a top-preserving sup-map: {0}")]
    NotSupMap(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsupported class for symbolic difference: {0}")]
    UnsupportedClass(String),
    #[error("category `{0}` is not confluent; colimit commutation requires confluence")]
    NotConfluent(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("degree {degree} exceeds enumeration bound {bound}")]
    DegreeBound { degree: usize, bound: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
