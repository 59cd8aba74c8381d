use thiserror::Error;

use crate::fixed::QFormat;

/// Base-matrix text did not parse. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("fixed-point format mismatch: {0} vs {1}")]
    FormatMismatch(QFormat, QFormat),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("superlayer size {size} does not divide the {layers} layers")]
    SuperlayerSize { size: usize, layers: usize },

    #[error("no admissible superlayer size for {layers} layers; use the serial 1x mode")]
    NoSuperlayer { layers: usize },

    #[error("layer index {0} out of range or repeated")]
    InvalidLayer(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
