use thiserror::Error;

use crate::formula::RelationKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("backend mismatch: expected {expected} scalars, found {found}")]
    BackendMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid scalar literal {0:?}")]
    InvalidScalar(String),
    #[error("spheres do not intersect: {0}")]
    NoIntersection(String),
    #[error("numeric sphere intersection did not converge")]
    SolverDiverged,
    #[error("exact L2 construction refused: {0} (use the float backend)")]
    ExactL2Refused(&'static str),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("arity mismatch for {relation}: expected {expected} {what}, found {found}")]
    Arity {
        relation: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid index for {relation}: {message}")]
    InvalidIndex { relation: String, message: String },
    #[error("unbound variable {0:?}")]
    Unbound(String),
    #[error("no implementation selected for {0:?}")]
    MissingImpl(RelationKind),
    #[error("{0} has no oracle at this index")]
    NoOracle(String),
    #[error("{0} has no formula definition")]
    NoDefinition(String),
    #[error("universe exceeds the cap of {cap} points")]
    UniverseOverflow { cap: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
