use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size-guard: {what} requires {limit}, got L={side}")]
    SizeGuard {
        what: &'static str,
        limit: &'static str,
        side: usize,
    },
    #[error("invalid-geometry: side length must be at least 2, got {0}")]
    InvalidGeometry(usize),
    #[error("invalid-parameters: {0}")]
    InvalidParameters(String),
    #[error("geometry-mismatch: L={0} vs L={1}")]
    GeometryMismatch(usize, usize),
    #[error("not-diagonal: configuration is not constant on diagonals")]
    NotDiagonal,
    #[error("parse: {0}")]
    Parse(String),
    #[error("insufficient-samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },
    #[error("degenerate-fit: {0}")]
    DegenerateFit(String),
    #[error("empty-input: {0}")]
    EmptyInput(&'static str),
    #[error("unknown-experiment: {0}")]
    UnknownExperiment(String),
    #[error("invalid-config: {0}")]
    InvalidConfig(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-parsable category, the token before the colon.
    pub fn category(&self) -> &'static str {
        match self {
            Error::SizeGuard { .. } => "size-guard",
            Error::InvalidGeometry(_) => "invalid-geometry",
            Error::InvalidParameters(_) => "invalid-parameters",
            Error::GeometryMismatch(..) => "geometry-mismatch",
            Error::NotDiagonal => "not-diagonal",
            Error::Parse(_) => "parse",
            Error::InsufficientSamples { .. } => "insufficient-samples",
            Error::DegenerateFit(_) => "degenerate-fit",
            Error::EmptyInput(_) => "empty-input",
            Error::UnknownExperiment(_) => "unknown-experiment",
            Error::InvalidConfig(_) => "invalid-config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
