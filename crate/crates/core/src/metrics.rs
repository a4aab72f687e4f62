//! Metric distributions and point estimates.
//!
//! Exact distributions are derived from the estimated confusion matrix.
//! The shortcut estimators skip the distributions entirely: they are exact
//! for accuracy and precision, and converge to the exact expectation at rate
//! O(1/sqrt(n)) for recall and F1. As a rule of thumb the exact route is
//! affordable below a window of about 500 predictions; above that, and when
//! no interval is needed, the shortcuts are the practical choice.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::confusion::{estimate_confusion, ConfusionEstimate, PredictionBatch};
use crate::distribution::{poisson_binomial_dp, DiscreteDistribution};
use crate::error::{Error, Result};
use crate::intervals::{hdi, HdiInterval};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Accuracy,
    Precision,
    Recall,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Accuracy,
        Metric::Precision,
        Metric::Recall,
        Metric::F1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    /// Full distributions; points are their expectations.
    #[default]
    Exact,
    /// Closed-form point estimates only.
    Shortcut,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Shortcut => "shortcut",
        }
    }
}

/// Estimate of one metric over one window.
///
/// `point` is `None` when the metric is undefined for the window.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricEstimate {
    pub metric: Metric,
    pub method: Method,
    pub point: Option<f64>,
    pub distribution: Option<DiscreteDistribution>,
    pub hdi: Option<HdiInterval>,
}

impl MetricEstimate {
    pub fn undefined(metric: Metric, method: Method) -> Self {
        MetricEstimate {
            metric,
            method,
            point: None,
            distribution: None,
            hdi: None,
        }
    }

    pub fn is_undefined(&self) -> bool {
        self.point.is_none()
    }
}

/// Distribution of accuracy, `X_correct / n`, where the number of correct
/// predictions is Poisson binomial over the per-record correctness
/// probabilities.
pub fn accuracy_distribution(batch: &PredictionBatch) -> Result<DiscreteDistribution> {
    batch.ensure_nonempty()?;
    let correctness: Vec<f64> = batch.records().iter().map(|r| r.correctness()).collect();
    Ok(poisson_binomial_dp(&correctness)?.scale_counts(batch.len() as u64))
}

/// Distribution of precision, `X_TP / n+`.
pub fn precision_distribution(est: &ConfusionEstimate) -> Result<DiscreteDistribution> {
    if est.n_positive == 0 {
        return Err(Error::UndefinedMetric(Metric::Precision));
    }
    Ok(est.dist_tp.scale_counts(est.n_positive))
}

/// Distribution of recall, `X_TP / (X_TP + X_FN)`.
///
/// The event `X_TP = X_FN = 0`, where recall is undefined, is folded into
/// the mass at zero.
pub fn recall_distribution(est: &ConfusionEstimate) -> DiscreteDistribution {
    let tp_zero = est.dist_tp.count_probability(0);
    let fn_zero = est.dist_fn.count_probability(0);

    let mut masses = BTreeMap::new();
    masses.insert(Rational::integer(0), tp_zero);
    masses.insert(Rational::integer(1), fn_zero - tp_zero * fn_zero);

    let fn_nonzero: Vec<(i64, f64)> = nonzero_counts(&est.dist_fn).collect();
    for (i, p_tp) in nonzero_counts(&est.dist_tp) {
        for &(j, p_fn) in &fn_nonzero {
            *masses.entry(Rational::new(i, i + j)).or_insert(0.0) += p_tp * p_fn;
        }
    }
    DiscreteDistribution::from_map(masses)
}

/// Distribution of F1, `2 X_TP / (X_TP + X_FN + n+)`.
pub fn f1_distribution(est: &ConfusionEstimate) -> Result<DiscreteDistribution> {
    if est.n_positive == 0 {
        return Err(Error::UndefinedMetric(Metric::F1));
    }
    let n_positive = est.n_positive as i64;

    let mut masses = BTreeMap::new();
    masses.insert(Rational::integer(0), est.dist_tp.count_probability(0));

    let fn_all: Vec<(i64, f64)> = est.dist_fn.iter().map(|(v, p)| (v.numer(), p)).collect();
    for (i, p_tp) in nonzero_counts(&est.dist_tp) {
        for &(j, p_fn) in &fn_all {
            *masses
                .entry(Rational::new(2 * i, i + j + n_positive))
                .or_insert(0.0) += p_tp * p_fn;
        }
    }
    Ok(DiscreteDistribution::from_map(masses))
}

fn nonzero_counts(d: &DiscreteDistribution) -> impl Iterator<Item = (i64, f64)> + '_ {
    d.iter()
        .map(|(v, p)| (v.numer(), p))
        .filter(|&(k, _)| k >= 1)
}

/// Mean correctness probability. Identical to the expectation of
/// [`accuracy_distribution`].
pub fn shortcut_accuracy(batch: &PredictionBatch) -> Result<f64> {
    batch.ensure_nonempty()?;
    let total: f64 = batch.records().iter().map(|r| r.correctness()).sum();
    Ok(total / batch.len() as f64)
}

/// Mean score over positive predictions. Identical to the expectation of
/// [`precision_distribution`].
pub fn shortcut_precision(batch: &PredictionBatch) -> Result<f64> {
    batch.ensure_nonempty()?;
    let n_positive = batch.n_positive();
    if n_positive == 0 {
        return Err(Error::UndefinedMetric(Metric::Precision));
    }
    Ok(batch.positive_scores().sum::<f64>() / n_positive as f64)
}

/// `sum_{I+} S / sum S`, the ratio of expected true positives to expected
/// actual positives.
pub fn shortcut_recall(batch: &PredictionBatch) -> Result<f64> {
    batch.ensure_nonempty()?;
    let total: f64 = batch.scores().sum();
    if total == 0.0 {
        return Err(Error::UndefinedMetric(Metric::Recall));
    }
    Ok(batch.positive_scores().sum::<f64>() / total)
}

/// `2 sum_{I+} S / (sum S + n+)`.
pub fn shortcut_f1(batch: &PredictionBatch) -> Result<f64> {
    batch.ensure_nonempty()?;
    let n_positive = batch.n_positive();
    if n_positive == 0 {
        return Err(Error::UndefinedMetric(Metric::F1));
    }
    let total: f64 = batch.scores().sum();
    Ok(2.0 * batch.positive_scores().sum::<f64>() / (total + n_positive as f64))
}

/// What [`estimate_all`] computes.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationConfig {
    pub metrics: Vec<Metric>,
    pub method: Method,
    /// Attach a `1 - alpha` HDI to exact estimates.
    pub alpha: Option<f64>,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            metrics: Metric::ALL.to_vec(),
            method: Method::Exact,
            alpha: Some(0.05),
        }
    }
}

/// Estimates every requested metric for one window.
///
/// Undefined metrics come back as [`MetricEstimate::undefined`] entries;
/// only an empty batch or an invalid alpha aborts.
pub fn estimate_all(
    batch: &PredictionBatch,
    config: &EstimationConfig,
) -> Result<Vec<MetricEstimate>> {
    batch.ensure_nonempty()?;
    if let Some(alpha) = config.alpha {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
    }
    match config.method {
        Method::Shortcut => config
            .metrics
            .iter()
            .map(|&metric| {
                let point = match metric {
                    Metric::Accuracy => shortcut_accuracy(batch),
                    Metric::Precision => shortcut_precision(batch),
                    Metric::Recall => shortcut_recall(batch),
                    Metric::F1 => shortcut_f1(batch),
                };
                undefined_to_none(point).map(|point| MetricEstimate {
                    metric,
                    method: Method::Shortcut,
                    point,
                    distribution: None,
                    hdi: None,
                })
            })
            .collect(),
        Method::Exact => {
            let needs_confusion = config.metrics.iter().any(|m| *m != Metric::Accuracy);
            let confusion = if needs_confusion {
                Some(estimate_confusion(batch)?)
            } else {
                None
            };
            config
                .metrics
                .iter()
                .map(|&metric| {
                    let distribution = match (metric, confusion.as_ref()) {
                        (Metric::Accuracy, _) => accuracy_distribution(batch),
                        (Metric::Precision, Some(c)) => precision_distribution(c),
                        (Metric::Recall, Some(c)) => Ok(recall_distribution(c)),
                        (Metric::F1, Some(c)) => f1_distribution(c),
                        (_, None) => {
                            unreachable!("confusion estimate computed for non-accuracy metrics")
                        }
                    };
                    let Some(distribution) = undefined_to_none(distribution)? else {
                        return Ok(MetricEstimate::undefined(metric, Method::Exact));
                    };
                    let hdi = config
                        .alpha
                        .map(|alpha| hdi(&distribution, alpha))
                        .transpose()?;
                    Ok(MetricEstimate {
                        metric,
                        method: Method::Exact,
                        point: Some(distribution.expectation()),
                        distribution: Some(distribution),
                        hdi,
                    })
                })
                .collect()
        }
    }
}

fn undefined_to_none<T>(result: Result<T>) -> Result<Option<T>> {
    match result {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedMetric(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
