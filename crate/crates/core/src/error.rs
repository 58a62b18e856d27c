use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("no peak: maximum lies on the edge of the frequency grid")]
    NoPeak,
    #[error("half-power crossing on the {side} side lies outside the grid")]
    BandwidthUnresolved { side: &'static str },
    #[error("minimizer did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },
    #[error("residual is not finite at parameters {params:?}")]
    NonFiniteResidual { params: Vec<f64> },
    #[error("insufficient span: {0}")]
    InsufficientSpan(String),
    #[error("insufficient data: need at least {needed} points, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("spin {index} at {omega} rad/s is not resonant with the cavity")]
    NotResonant { index: usize, omega: f64 },
    #[error("couplings are not uniform")]
    NonUniformCoupling,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Stable machine-readable name, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::InvalidSpectrum(_) => "InvalidSpectrum",
            Error::NoPeak => "NoPeak",
            Error::BandwidthUnresolved { .. } => "BandwidthUnresolved",
            Error::NotConverged { .. } => "NotConverged",
            Error::NonFiniteResidual { .. } => "NonFiniteResidual",
            Error::InsufficientSpan(_) => "InsufficientSpan",
            Error::InsufficientData { .. } => "InsufficientData",
            Error::NotResonant { .. } => "NotResonant",
            Error::NonUniformCoupling => "NonUniformCoupling",
            Error::Parse(e) => e.kind(),
        }
    }
}

/// Errors from the instrument and interchange parsers. Every variant that
/// refers to input content carries a 1-based line number.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: malformed option line: {reason}")]
    MalformedOptionLine { line: usize, reason: String },
    #[error("missing option line before data")]
    MissingOptionLine,
    #[error("line {line}: Touchstone version 2 files are not supported")]
    UnsupportedVersion { line: usize },
    #[error("line {line}: expected 9 columns for a two-port file, found {found}")]
    WrongPortCount { line: usize, found: usize },
    #[error("line {line}: frequency is not strictly increasing")]
    NonMonotonicFrequency { line: usize },
    #[error("line {line}: cannot parse `{token}` as a number")]
    InvalidNumber { line: usize, token: String },
    #[error("line {line}: non-finite value")]
    NonFiniteValue { line: usize },
    #[error("missing column `{name}`")]
    MissingColumn { name: String },
    #[error("field {field} T does not share the common frequency grid")]
    RaggedGrid { field: f64 },
    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
}

impl ParseError {
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::MalformedOptionLine { .. } => "MalformedOptionLine",
            ParseError::MissingOptionLine => "MissingOptionLine",
            ParseError::UnsupportedVersion { .. } => "UnsupportedVersion",
            ParseError::WrongPortCount { .. } => "WrongPortCount",
            ParseError::NonMonotonicFrequency { .. } => "NonMonotonicFrequency",
            ParseError::InvalidNumber { .. } => "InvalidNumber",
            ParseError::NonFiniteValue { .. } => "NonFiniteValue",
            ParseError::MissingColumn { .. } => "MissingColumn",
            ParseError::RaggedGrid { .. } => "RaggedGrid",
            ParseError::TooFewPoints { .. } => "TooFewPoints",
            ParseError::Csv { .. } => "Csv",
        }
    }

    /// Location of the problem in the input, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MalformedOptionLine { line, .. }
            | ParseError::UnsupportedVersion { line }
            | ParseError::WrongPortCount { line, .. }
            | ParseError::NonMonotonicFrequency { line }
            | ParseError::InvalidNumber { line, .. }
            | ParseError::NonFiniteValue { line }
            | ParseError::Csv { line, .. } => Some(*line),
            _ => None,
        }
    }
}

/// Shorthand for range checks on constructor arguments.
pub(crate) fn check(
    ok: bool,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected,
        })
    }
}
