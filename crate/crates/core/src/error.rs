use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite oracle output")]
    NonFiniteOracle,
    #[error("no reference optimum")]
    NoReferenceOptimum,
    #[error("not strongly convex")]
    NotStronglyConvex,
    #[error("no observations")]
    NoObservations,
    #[error("shape error: {0}")]
    Shape(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not binary: found {0} distinct labels")]
    NotBinary(usize),
    #[error("cannot initialize estimate")]
    CannotInitialize,
    #[error("invalid solver spec: {0}")]
    InvalidSpec(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no stable step")]
    NoStableStep,
    #[error("non-finite input")]
    NonFiniteInput,
}
