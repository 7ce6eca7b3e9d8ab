use std::fmt;

use thiserror::Error;

/// A syntax or semantic error in a textual input, with an optional position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError { message: message.into(), line: None, column: None }
    }

    pub fn at(message: impl Into<String>, line: usize, column: usize) -> Self {
        ParseError { message: message.into(), line: Some(line), column: Some(column) }
    }

    pub fn with_line(mut self, line: usize) -> Self {
        if self.line.is_none() {
            self.line = Some(line);
        }
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("missing operation table `{0}`")]
    MissingTable(&'static str),
    #[error("structure has no weight data")]
    MissingWeight,
    #[error("not a strict structure: {0}")]
    NotStrict(String),
    #[error("structure is not an ETS: {0}")]
    NotEts(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("parameter structures differ between operands")]
    StructureMismatch,
    #[error("map is not an algebra morphism: {0}")]
    NotMorphism(String),
    #[error("nonzero weight: {0}")]
    NonzeroWeight(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
}

pub type Result<T> = std::result::Result<T, Error>;
