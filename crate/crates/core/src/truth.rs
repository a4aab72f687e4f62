//! Realised metrics of a labelled window.

use crate::confusion::PredictionBatch;
use crate::error::{Error, Result};
use crate::metrics::Metric;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

/// Metrics computed from realised labels; `None` where the denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueMetrics {
    pub counts: ConfusionCounts,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

impl TrueMetrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
        }
    }
}

pub fn true_metrics(batch: &PredictionBatch) -> Result<TrueMetrics> {
    batch.ensure_nonempty()?;
    let mut c = ConfusionCounts::default();
    for (i, r) in batch.records().iter().enumerate() {
        match (r.predicted, r.label.ok_or(Error::MissingLabel(i))?) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(TrueMetrics {
        counts: c,
        accuracy: ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn_),
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        f1: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
    })
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn batch(rows: &[(bool, bool)]) -> PredictionBatch {
        let predicted: alloc::vec::Vec<bool> = rows.iter().map(|r| r.0).collect();
        let labels: alloc::vec::Vec<bool> = rows.iter().map(|r| r.1).collect();
        PredictionBatch::from_labelled_parts(&predicted, &alloc::vec![0.5; rows.len()], &labels)
            .unwrap()
    }

    #[test]
    fn hand_computed() {
        // TP=2, FP=0, FN=1, TN=1
        let m = true_metrics(&batch(&[
            (true, true),
            (true, true),
            (false, true),
            (false, false),
        ]))
        .unwrap();
        assert_eq!(
            m.counts,
            ConfusionCounts {
                tp: 2,
                fp: 0,
                tn: 1,
                fn_: 1
            }
        );
        assert_eq!(m.precision, Some(1.0));
        assert!((m.recall.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.f1.unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(m.accuracy, Some(0.75));
    }

    #[test]
    fn all_correct() {
        let m = true_metrics(&batch(&[(true, true), (false, false)])).unwrap();
        assert_eq!([m.accuracy, m.precision, m.recall, m.f1], [Some(1.0); 4]);
    }

    #[test]
    fn undefined_denominators() {
        let m = true_metrics(&batch(&[(false, false), (false, true)])).unwrap();
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, Some(0.0));
        let m = true_metrics(&batch(&[(false, false)])).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (None, None, None));
    }

    #[test]
    fn requires_labels() {
        let unlabelled = PredictionBatch::from_parts(&[true], &[0.9]).unwrap();
        assert_eq!(true_metrics(&unlabelled), Err(Error::MissingLabel(0)));
    }
}
