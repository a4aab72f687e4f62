use core::fmt;

use thiserror::Error;

use crate::metrics::Metric;
use crate::rational::Rational;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the estimation routines.
///
/// [`Error::UndefinedMetric`] is not a failure of the input: it signals that
/// a metric has no value for the given window (for example precision with no
/// positive predictions). Every other variant is a domain error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability at index {index} is outside [0, 1]: {value}")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("negative probability {probability} for support value {value}")]
    NegativeProbability { value: Rational, probability: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("renormalisation shifted total mass by {0:e}")]
    RenormalizationDrift(f64),
    #[error("support value {value} is not a count in 0..={bound}")]
    SupportOutOfRange { value: Rational, bound: u64 },
    #[error("distribution has no support")]
    EmptyDistribution,
    #[error("batch is empty")]
    EmptyBatch,
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("record {0} carries no true label")]
    MissingLabel(usize),
    #[error("cannot split {records} records into {bins} bins")]
    InvalidBinCount { bins: usize, records: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("{0} is undefined for this window")]
    UndefinedMetric(Metric),
}

impl Error {
    pub fn is_undefined_metric(&self) -> bool {
        matches!(self, Error::UndefinedMetric(_))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
