use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("array is not square: row {row} has {found} entries, expected {expected}")]
    NotSquare { row: usize, found: usize, expected: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },

    #[error("diagonal symbols are not distinct from off-diagonal symbols")]
    NotDiagDistinct,

    #[error("symbol {symbol} exceeds the allowed maximum {max}")]
    SymbolOutOfRange { symbol: u64, max: u64 },

    #[error("a string appears both on and off the diagonal")]
    StringOnAndOffDiagonal,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("symbol id space exhausted")]
    SymbolOverflow,

    #[error("inconclusive: no verdict by iteration {iteration}")]
    Inconclusive { iteration: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("cannot write {format}: {reason}")]
    Unrepresentable { format: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// True for errors caused by the caller's input rather than by the engine.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NotSquare { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotSymmetric { .. }
                | Error::NotDiagDistinct
                | Error::SymbolOutOfRange { .. }
                | Error::IndexOutOfRange { .. }
                | Error::CapExceeded { .. }
                | Error::Parse { .. }
                | Error::Unrepresentable { .. }
                | Error::Io(_)
        )
    }
}
