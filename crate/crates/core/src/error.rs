//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::space::{CarrierKind, Point};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point of one carrier kind was handed to a space of another kind,
    /// or lies outside the carrier (negative value, index out of range).
    #[error("point {point} does not belong to the {expected} carrier")]
    CarrierMismatch { point: Point, expected: CarrierKind },

    /// Table is not square, has negative or non-finite entries, or is empty.
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    /// A tabulated candidate failed one of the partial metric axioms.
    #[error("axiom {axiom} violated at {witness:?}: lhs {lhs} vs rhs {rhs}")]
    AxiomViolation {
        axiom: String,
        witness: Vec<Point>,
        lhs: f64,
        rhs: f64,
    },

    #[error("distance p({x}, {y}) is not finite")]
    NonFiniteDistance { x: Point, y: Point },

    #[error("invalid contraction spec: {0}")]
    InvalidSpec(String),

    /// The map produced a value outside the carrier of the space.
    #[error("F({x}, {y}) = {image} escapes the carrier")]
    DomainEscape { x: Point, y: Point, image: Point },

    #[error("empty sample")]
    EmptySample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("expression evaluated to a non-finite value")]
    NonFiniteValue,

    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
