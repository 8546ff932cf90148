use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid range [{lo}, {hi}]: {reason}")]
    InvalidRange { lo: f64, hi: f64, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("variant `{variant}`: {conversions} conversions exceed {visitors} visitors")]
    ConversionsExceedVisitors {
        variant: String,
        conversions: u64,
        visitors: u64,
    },

    #[error("variant `{variant}`: prior has {prior_len} components, expected {expected}")]
    PriorLengthMismatch {
        variant: String,
        prior_len: usize,
        expected: usize,
    },

    #[error("variant `{variant}`: metric `{metric}` is unavailable ({reason})")]
    MetricUnavailable {
        variant: String,
        metric: String,
        reason: &'static str,
    },

    #[error("sample vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("every reference sample is zero; relative metric is undefined")]
    AllReferenceSamplesZero,

    #[error("at least two variants are required, got {0}")]
    FewerThanTwoVariants(usize),

    #[error("unknown baseline variant `{0}`")]
    UnknownBaseline(String),

    #[error("checkpoint {checkpoint} is outside [1, {n}]")]
    CheckpointOutOfRange { checkpoint: u64, n: u64 },

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("invariant violated at `{path}`: {message}")]
    Invariant { path: String, message: String },

    #[error("unknown model `{0}` (expected one_option, multi_options or aggregated)")]
    UnknownModel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invariant {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by the environment rather than by invalid input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
