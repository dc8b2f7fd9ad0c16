use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its documented domain.
    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frame length mismatch: expected {expected} samples, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// Hypothesis and supplied symbol/jammer disagree.
    #[error("hypothesis {hypothesis} {reason}")]
    HypothesisMismatch { hypothesis: &'static str, reason: &'static str },

    /// Fewer surviving bins than the detector needs.
    #[error("only {available} bins survive elimination, {needed} required")]
    InsufficientBins { needed: usize, available: usize },

    /// Experiment configuration rejected before any trial ran.
    #[error("config field `{field}`: {reason}")]
    Config { field: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }
}
