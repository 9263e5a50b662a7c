use thiserror::Error;

/// Errors raised by the algebra engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different coefficient fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("moduli at positions {0} and {1} are not coprime")]
    NotCoprime(usize, usize),
    #[error("cannot parse {input:?}: {message}")]
    Parse { input: String, message: String },
    #[error("polynomial division is not exact")]
    InexactDivision,
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("zero polynomial given as a section")]
    ZeroSection,
    #[error("point does not belong to the ambient: {0}")]
    PointNotInAmbient(String),
    #[error("polynomial is not in the span of the sections")]
    NoSolution,
    #[error("second system is not contained in the first")]
    NotSubsystem,
    #[error("linear system has no sections")]
    EmptySystem,
    #[error("scheme ideal must be marked saturated (saturation is not computed)")]
    NotSaturated,
    #[error("point is not a singular point of the hypersurface")]
    NotSingular,
    #[error("unsupported characteristic {0}: {1}")]
    UnsupportedCharacteristic(u64, String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(input: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        input: input.to_string(),
        message: message.into(),
    }
}
