//! Calibration error of labelled windows, and labels drawn so that a set of
//! scores is calibrated by construction.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::confusion::PredictionBatch;
use crate::error::{Error, Result};

pub const DEFAULT_ACE_BINS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationBin {
    pub mean_score: f64,
    pub positive_rate: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub ace: f64,
    pub bins: Vec<CalibrationBin>,
}

/// Adaptive expected calibration error.
///
/// Records are sorted by score and split into `num_bins` contiguous bins of
/// equal size; the first `n % num_bins` bins take one extra record. The
/// error is the unweighted mean over bins of `|mean score - positive rate|`.
///
/// Equal scores are ordered by label, so that the result does not depend on
/// the order of the records.
pub fn ace(batch: &PredictionBatch, num_bins: usize) -> Result<CalibrationReport> {
    let records = batch.records();
    let n = records.len();
    if num_bins == 0 || num_bins > n {
        return Err(Error::InvalidBinCount {
            bins: num_bins,
            records: n,
        });
    }
    let mut rows = Vec::with_capacity(n);
    for (i, r) in records.iter().enumerate() {
        let label = r.label.ok_or(Error::MissingLabel(i))?;
        rows.push((r.score, label));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let base = n / num_bins;
    let extra = n % num_bins;
    let mut bins = Vec::with_capacity(num_bins);
    let mut start = 0;
    for b in 0..num_bins {
        let count = base + usize::from(b < extra);
        let slice = &rows[start..start + count];
        start += count;
        let score_sum: f64 = slice.iter().map(|r| r.0).sum();
        let positives = slice.iter().filter(|r| r.1).count();
        bins.push(CalibrationBin {
            mean_score: score_sum / count as f64,
            positive_rate: positives as f64 / count as f64,
            count,
        });
    }
    let ace = bins
        .iter()
        .map(|b| (b.mean_score - b.positive_rate).abs())
        .sum::<f64>()
        / num_bins as f64;
    Ok(CalibrationReport { ace, bins })
}

/// Draws `label_i ~ Bernoulli(score_i)` independently.
pub fn reverse_sample_labels(scores: &[f64], seed: u64) -> Result<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_labels_with(scores, &mut rng)
}

pub(crate) fn sample_labels_with<R: Rng + ?Sized>(
    scores: &[f64],
    rng: &mut R,
) -> Result<Vec<bool>> {
    scores
        .iter()
        .enumerate()
        .map(|(index, &s)| {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::ProbabilityOutOfRange { index, value: s });
            }
            // random() lies in [0, 1): score 1 always yields a positive, score 0 never.
            Ok(rng.random::<f64>() < s)
        })
        .collect()
}

/// Predicts positive iff `score >= threshold`.
pub fn threshold_predictions(scores: &[f64], threshold: f64) -> Vec<bool> {
    scores.iter().map(|&s| s >= threshold).collect()
}
