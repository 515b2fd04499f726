use thiserror::Error;

use crate::series::MonthIndex;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants fall into two families: problems with the input data or the
/// request (see [`Error::is_input_error`]) and failures of the analysis
/// itself on otherwise valid data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid month `{0}` (expected YYYY-MM with month 01..12)")]
    InvalidMonth(String),

    #[error("series `{series}` is empty")]
    EmptySeries { series: String },

    #[error("series `{series}` has a gap: {after} is followed by {next}")]
    GapInSeries {
        series: String,
        after: MonthIndex,
        next: MonthIndex,
    },

    #[error("series `{series}`: month {month} does not come after {previous}")]
    OutOfOrder {
        series: String,
        previous: MonthIndex,
        month: MonthIndex,
    },

    #[error("{context}: {reason}")]
    DomainError { context: String, reason: String },

    #[error("series overlap is {overlap} months, at least {required} required")]
    NoOverlap { overlap: usize, required: usize },

    #[error("series `{series}` is degenerate: {reason}")]
    DegenerateSeries { series: String, reason: String },

    #[error("series `{series}`: weights sum to zero")]
    ZeroWeightSum { series: String },

    #[error("series `{series}` is constant, correlation is undefined")]
    ConstantSeries { series: String },

    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("insufficient data for {what}: need {needed}, have {available}")]
    InsufficientData {
        what: String,
        needed: usize,
        available: usize,
    },

    #[error("invalid degrees of freedom: {0}")]
    InvalidDof(f64),

    #[error("negative test statistic: {0}")]
    NegativeStatistic(f64),

    #[error("unsupported significance level {0} (use 1, 5 or 10 percent)")]
    UnsupportedLevel(String),

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series `{series}` has a unit root and Granger tests need stationary inputs; override with --assume-stationary")]
    NonStationaryInput { series: String },

    #[error("month {month} is not in the series grid")]
    MonthNotInGrid { month: MonthIndex },

    #[error("{variant} reference period: mean LGD {mean} minus std {std} is {denominator}, not positive")]
    NonPositiveDenominator {
        variant: String,
        mean: f64,
        std: f64,
        denominator: f64,
    },

    #[error("downturn window is empty")]
    EmptyWindow,

    #[error("ELGD {0} is outside [0, 1]")]
    InvalidElgd(f64),

    #[error("invalid synthetic spec, field `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error("line {line}: {reason}")]
    ParseError { line: usize, reason: String },

    #[error("HTTP {status} from {url}")]
    HttpError { status: u16, url: String },

    #[error("transport failure for {url}: {reason}")]
    TransportError { url: String, reason: String },

    #[error("malformed payload from {url}: {reason}")]
    WireFormatError { url: String, reason: String },

    #[error("frequency mismatch for {url}: {reason}")]
    FrequencyMismatch { url: String, reason: String },

    #[error("I/O error on {path}: {reason}")]
    IoError { path: String, reason: String },
}

impl Error {
    /// True for bad input data, bad requests, and I/O failures; false for
    /// failures of the analysis on data that passed validation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidMonth(_)
                | Error::EmptySeries { .. }
                | Error::GapInSeries { .. }
                | Error::OutOfOrder { .. }
                | Error::DomainError { .. }
                | Error::NoOverlap { .. }
                | Error::InvalidArgument(_)
                | Error::UnsupportedLevel(_)
                | Error::InvalidElgd(_)
                | Error::InvalidSpec { .. }
                | Error::ParseError { .. }
                | Error::HttpError { .. }
                | Error::TransportError { .. }
                | Error::WireFormatError { .. }
                | Error::FrequencyMismatch { .. }
                | Error::IoError { .. }
        )
    }

    pub(crate) fn io(path: impl std::fmt::Display, err: std::io::Error) -> Self {
        Error::IoError {
            path: path.to_string(),
            reason: err.to_string(),
        }
    }
}
