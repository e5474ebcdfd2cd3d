use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The data span is zero along some axis, so no grid spacing exists.
    #[error("degenerate data range on axis {axis}: min = max = {value}")]
    DegenerateRange { axis: usize, value: f64 },

    /// Every component mass is zero; the weight update has nothing to normalize.
    #[error("no component mass: data lies beyond the numeric support of every component")]
    NoMass,

    #[error("numerical underflow: {0}")]
    NumericalUnderflow(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures that come from floating point rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoMass | Error::NumericalUnderflow(_))
    }
}
