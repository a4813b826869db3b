use std::fmt;

use thiserror::Error;

/// A positioned diagnostic from the presentation parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("invalid presentation: {0}")]
    Presentation(String),
    #[error("algebra is not finite-dimensional: {0}")]
    NotFiniteDimensional(String),
    #[error("unsupported presentation: {0}")]
    Unsupported(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("not a dg algebra homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("operands live over different algebras")]
    AlgebraMismatch,
    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(i64, i64),
    #[error("invalid cutoff {0}")]
    InvalidCutoff(i64),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
