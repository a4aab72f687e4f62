//! Label-free performance estimation for binary classifiers.
//!
//! Given a window of predictions and their calibrated confidence scores, the
//! confusion-matrix counts are modelled as Poisson binomial random variables.
//! From those, full distributions of accuracy, precision, recall and F1 are
//! derived exactly, along with point estimates, closed-form shortcut
//! estimators and highest-density intervals.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File formats, windowing and the command line live in the
//! `perfest` crate.
//!
//! ```
//! use perfest_core::{estimate_confusion, recall_distribution, PredictionBatch};
//!
//! let batch = PredictionBatch::from_parts(&[true, true, false], &[0.8, 0.6, 0.3]).unwrap();
//! let confusion = estimate_confusion(&batch).unwrap();
//! let recall = recall_distribution(&confusion);
//! assert!((recall.expectation() - 0.806).abs() < 1e-12);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod calibration;
pub mod confusion;
pub mod distribution;
mod error;
pub mod intervals;
pub mod metrics;
mod rational;
pub mod synthesis;
pub mod truth;

pub use calibration::{
    ace, reverse_sample_labels, threshold_predictions, CalibrationBin, CalibrationReport,
};
pub use confusion::{
    estimate_confusion, frequency_estimates, ConfusionEstimate, FrequencyEstimates,
    PredictionBatch, PredictionRecord,
};
pub use distribution::{
    poisson_binomial_cf, poisson_binomial_dp, DiscreteDistribution, PROBABILITY_TOLERANCE,
};
pub use error::{Error, Result};
pub use intervals::{hdi, HdiInterval};
pub use metrics::{
    accuracy_distribution, estimate_all, f1_distribution, precision_distribution,
    recall_distribution, shortcut_accuracy, shortcut_f1, shortcut_precision, shortcut_recall,
    EstimationConfig, Method, Metric, MetricEstimate,
};
pub use rational::Rational;
pub use truth::{true_metrics, ConfusionCounts, TrueMetrics};
