//! Estimated confusion matrix for a window of scored predictions.

use alloc::vec::Vec;

use crate::distribution::{poisson_binomial_dp, DiscreteDistribution};
use crate::error::{Error, Result};

/// One monitored prediction.
///
/// `score` is the calibrated probability that the instance is positive,
/// whatever the predicted label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionRecord {
    pub predicted: bool,
    pub score: f64,
    pub label: Option<bool>,
}

impl PredictionRecord {
    pub fn new(predicted: bool, score: f64) -> Result<Self> {
        Self::with_label(predicted, score, None)
    }

    pub fn with_label(predicted: bool, score: f64, label: Option<bool>) -> Result<Self> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::ProbabilityOutOfRange {
                index: 0,
                value: score,
            });
        }
        Ok(PredictionRecord {
            predicted,
            score,
            label,
        })
    }

    /// Probability that this prediction is correct.
    pub fn correctness(&self) -> f64 {
        if self.predicted {
            self.score
        } else {
            1.0 - self.score
        }
    }
}

/// An ordered window of predictions.
///
/// Batches may violate confidence-consistency (equal scores with different
/// predicted labels); nothing here depends on it, but the unbiasedness
/// guarantees for the frequency estimates assume it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionBatch {
    records: Vec<PredictionRecord>,
}

impl PredictionBatch {
    pub fn new(records: Vec<PredictionRecord>) -> Self {
        PredictionBatch { records }
    }

    /// Unlabelled batch from parallel prediction and score slices.
    pub fn from_parts(predicted: &[bool], scores: &[f64]) -> Result<Self> {
        Self::build(predicted, scores, None)
    }

    pub fn from_labelled_parts(
        predicted: &[bool],
        scores: &[f64],
        labels: &[bool],
    ) -> Result<Self> {
        Self::build(predicted, scores, Some(labels))
    }

    fn build(predicted: &[bool], scores: &[f64], labels: Option<&[bool]>) -> Result<Self> {
        if predicted.len() != scores.len() || labels.is_some_and(|l| l.len() != scores.len()) {
            return Err(Error::InvalidParameter(
                "prediction, score and label slices differ in length",
            ));
        }
        let mut records = Vec::with_capacity(scores.len());
        for (index, (&p, &score)) in predicted.iter().zip(scores).enumerate() {
            if !(0.0..=1.0).contains(&score) {
                return Err(Error::ProbabilityOutOfRange {
                    index,
                    value: score,
                });
            }
            records.push(PredictionRecord {
                predicted: p,
                score,
                label: labels.map(|l| l[index]),
            });
        }
        Ok(PredictionBatch { records })
    }

    pub fn records(&self) -> &[PredictionRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<PredictionRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of positive predictions.
    pub fn n_positive(&self) -> usize {
        self.records.iter().filter(|r| r.predicted).count()
    }

    /// Number of negative predictions.
    pub fn n_negative(&self) -> usize {
        self.len() - self.n_positive()
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.score)
    }

    pub fn positive_scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter(|r| r.predicted).map(|r| r.score)
    }

    pub fn negative_scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.records
            .iter()
            .filter(|r| !r.predicted)
            .map(|r| r.score)
    }

    pub fn is_labelled(&self) -> bool {
        self.records.iter().all(|r| r.label.is_some())
    }

    /// Sub-window `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> PredictionBatch {
        PredictionBatch {
            records: self.records[start..end].to_vec(),
        }
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.records.is_empty() {
            Err(Error::EmptyBatch)
        } else {
            Ok(())
        }
    }
}

impl FromIterator<PredictionRecord> for PredictionBatch {
    fn from_iter<I: IntoIterator<Item = PredictionRecord>>(iter: I) -> Self {
        PredictionBatch {
            records: iter.into_iter().collect(),
        }
    }
}

/// Distributions and point estimates for the four confusion-matrix cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionEstimate {
    pub dist_tp: DiscreteDistribution,
    pub dist_fp: DiscreteDistribution,
    pub dist_tn: DiscreteDistribution,
    pub dist_fn: DiscreteDistribution,
    pub e_tp: f64,
    pub e_fp: f64,
    pub e_tn: f64,
    pub e_fn: f64,
    pub n_positive: u64,
    pub n_negative: u64,
}

/// Estimates the confusion matrix of a batch.
///
/// True positives follow a Poisson binomial law over the scores of positive
/// predictions, true negatives over the complements of the scores of
/// negative predictions. False positives and false negatives are the count
/// complements.
pub fn estimate_confusion(batch: &PredictionBatch) -> Result<ConfusionEstimate> {
    batch.ensure_nonempty()?;
    let positive: Vec<f64> = batch.positive_scores().collect();
    let negative_complement: Vec<f64> = batch.negative_scores().map(|s| 1.0 - s).collect();
    let n_positive = positive.len() as u64;
    let n_negative = negative_complement.len() as u64;

    let dist_tp = poisson_binomial_dp(&positive)?;
    let dist_tn = poisson_binomial_dp(&negative_complement)?;
    let dist_fp = dist_tp.complement_count(n_positive)?;
    let dist_fn = dist_tn.complement_count(n_negative)?;

    Ok(ConfusionEstimate {
        e_tp: batch.positive_scores().sum(),
        e_fp: batch.positive_scores().map(|s| 1.0 - s).sum(),
        e_tn: negative_complement.iter().sum(),
        e_fn: batch.negative_scores().sum(),
        dist_tp,
        dist_fp,
        dist_tn,
        dist_fn,
        n_positive,
        n_negative,
    })
}

/// Relative frequency estimates of the confusion cells.
///
/// Positive-prediction frequencies are absent when there are no positive
/// predictions, and likewise for the negative side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyEstimates {
    pub tpf: Option<f64>,
    pub fpf: Option<f64>,
    pub tnf: Option<f64>,
    pub fnf: Option<f64>,
}

pub fn frequency_estimates(batch: &PredictionBatch) -> Result<FrequencyEstimates> {
    batch.ensure_nonempty()?;
    let mean_positive = mean(batch.positive_scores());
    let mean_negative = mean(batch.negative_scores());
    Ok(FrequencyEstimates {
        tpf: mean_positive,
        fpf: mean_positive.map(|m| 1.0 - m),
        fnf: mean_negative,
        tnf: mean_negative.map(|m| 1.0 - m),
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}
