use thiserror::Error;

/// Errors raised by the registration library.
///
/// Every variant has a stable short code (see [`Error::code`]) which the
/// command-line front end reports alongside the message.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input has fewer than two distinct observations")]
    EmptyInput,
    #[error("non-finite value at record {index}")]
    NonFiniteValue { index: usize },
    #[error("duplicate observation time {time}")]
    DuplicateTime { time: f64 },
    #[error("length mismatch: {times} times but {values} values")]
    LengthMismatch { times: usize, values: usize },
    #[error("observation times are not strictly increasing at index {index}")]
    NotIncreasing { index: usize },
    #[error("time {t} outside [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("time ranges [{a_lo}, {a_hi}] and [{b_lo}, {b_hi}] do not overlap")]
    NoOverlap {
        a_lo: f64,
        a_hi: f64,
        b_lo: f64,
        b_hi: f64,
    },
    #[error("bandwidth must be positive and finite, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("degenerate range: {0}")]
    DegenerateRange(&'static str),
    #[error("point {s} outside warp domain [{lo}, {hi}]")]
    OutOfDomain { s: f64, lo: f64, hi: f64 },
    #[error("invalid warp: {0}")]
    InvalidWarp(String),
    #[error(
        "alignment denominator vanished: the warp maps data set 2 outside the kernel support of data set 1{}",
        if *.at_initial { " at the initial warp; try a wider h1" } else { "" }
    )]
    ZeroDenominator { at_initial: bool },
    #[error("kernel {0} is not differentiable; use gaussian, epanechnikov or biweight for K1")]
    NonDifferentiableKernel(&'static str),
    #[error("true warp leaves the interpolation range of m: {0}")]
    DomainMismatch(String),
    #[error("Simpson's rule needs an odd number (>= 3) of points, got {0}")]
    EvenPointCount(usize),
    #[error("grid spacing must be positive and uniform")]
    NonUniformGrid,
    #[error("true function has zero squared norm")]
    ZeroNorm,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code for this error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EMPTY_INPUT",
            Error::NonFiniteValue { .. } => "NON_FINITE_VALUE",
            Error::DuplicateTime { .. } => "DUPLICATE_TIME",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::NotIncreasing { .. } => "NOT_INCREASING",
            Error::OutOfRange { .. } => "OUT_OF_RANGE",
            Error::NoOverlap { .. } => "NO_OVERLAP",
            Error::NonPositiveBandwidth(_) => "NON_POSITIVE_BANDWIDTH",
            Error::DegenerateRange(_) => "DEGENERATE_RANGE",
            Error::OutOfDomain { .. } => "OUT_OF_DOMAIN",
            Error::InvalidWarp(_) => "INVALID_WARP",
            Error::ZeroDenominator { .. } => "ZERO_DENOMINATOR",
            Error::NonDifferentiableKernel(_) => "NON_DIFFERENTIABLE_KERNEL",
            Error::DomainMismatch(_) => "DOMAIN_MISMATCH",
            Error::EvenPointCount(_) => "EVEN_POINT_COUNT",
            Error::NonUniformGrid => "NON_UNIFORM_GRID",
            Error::ZeroNorm => "ZERO_NORM",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Io(_) => "IO_ERROR",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
