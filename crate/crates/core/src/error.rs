use thiserror::Error;

use crate::superalgebra::Shape;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: Shape, right: Shape },

    #[error("{what} index {index} out of range (bound {bound})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator word contains a non-Weyl atom: {0}")]
    NonWeylAtom(String),

    #[error("element leaves the truncation window (degree {degree} > {bound})")]
    WindowExceeded { degree: usize, bound: usize },

    #[error("operation requires a non-singular Whittaker type")]
    SingularType,

    #[error("representation check failed: {0}")]
    InvalidRep(String),

    #[error("singular transition matrix: {0}")]
    SingularMatrix(String),

    #[error("parse error at line {line}, column {column}: {message} (expected one of: {})", expected.join(", "))]
    Parse {
        line: usize,
        column: usize,
        message: String,
        expected: Vec<String>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_shape(left: Shape, right: Shape) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { left, right })
    }
}
