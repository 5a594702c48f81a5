use thiserror::Error;

/// Errors raised by the slicing library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hyperplane coefficients are all zero")]
    AllZeroCoefficients,
    #[error("dimension must be at least 1")]
    DimensionZero,
    #[error("non-finite scalar {0}")]
    NonFiniteScalar(f64),
    #[error("non-finite entry at index {index}")]
    NonFiniteEntry { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),
    #[error("invalid scalar literal `{0}`")]
    InvalidScalar(String),
    #[error("decomposition parts overlap at coordinate {index}")]
    OverlappingSupports { index: usize },
    #[error("plane {index} is not unit-normalized (norm {norm})")]
    UnnormalizedPlane { index: usize, norm: f64 },
    #[error("dimension {0} is too small for the dyadic sampler (need n >= 2)")]
    DimensionTooSmall(usize),
    #[error("configuration has no planes")]
    EmptyConfiguration,
    #[error("rejection sampling exhausted {retries} retries")]
    RetriesExhausted { retries: usize },
    #[error("bias coordinate {index} = {value} outside [-1, 1]")]
    BiasOutOfRange { index: usize, value: f64 },
    #[error("bias sup-norm {0} exceeds 1/2")]
    BiasTooLarge(f64),
    #[error("dimension {n} exceeds the exact oracle limit {limit}")]
    DimensionTooLargeForOracle { n: usize, limit: usize },
    #[error("alpha must be non-negative")]
    NegativeAlpha,
    #[error("dimension {n} exceeds the enumeration limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("plane index {index} out of range for {m} planes")]
    PlaneIndexOutOfRange { index: usize, m: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed configuration: {0}")]
    Config(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::AllZeroCoefficients => "AllZeroCoefficients",
            Error::DimensionZero => "DimensionZero",
            Error::NonFiniteScalar(_) => "NonFiniteScalar",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnknownConstruction(_) => "UnknownConstruction",
            Error::InvalidScalar(_) => "InvalidScalar",
            Error::OverlappingSupports { .. } => "OverlappingSupports",
            Error::UnnormalizedPlane { .. } => "UnnormalizedPlane",
            Error::DimensionTooSmall(_) => "DimensionTooSmall",
            Error::EmptyConfiguration => "EmptyConfiguration",
            Error::RetriesExhausted { .. } => "RetriesExhausted",
            Error::BiasOutOfRange { .. } => "BiasOutOfRange",
            Error::BiasTooLarge(_) => "BiasTooLarge",
            Error::DimensionTooLargeForOracle { .. } => "DimensionTooLargeForOracle",
            Error::NegativeAlpha => "NegativeAlpha",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::PlaneIndexOutOfRange { .. } => "PlaneIndexOutOfRange",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Config(_) => "Config",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
