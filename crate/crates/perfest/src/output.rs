//! JSON renderings of true metrics and calibration reports, and dataset export.

use std::io::{self, Write};

use perfest_core::synthesis::SyntheticDataset;
use perfest_core::{CalibrationReport, PredictionBatch, TrueMetrics};
use serde::Serialize;
use serde_json::json;

use crate::input::Format;

pub fn true_metrics_json(m: &TrueMetrics) -> serde_json::Value {
    let c = m.counts;
    json!({
        "n": c.tp + c.fp + c.tn + c.fn_,
        "tp": c.tp,
        "fp": c.fp,
        "tn": c.tn,
        "fn": c.fn_,
        "accuracy": m.accuracy,
        "precision": m.precision,
        "recall": m.recall,
        "f1": m.f1,
    })
}

pub fn calibration_json(report: &CalibrationReport) -> serde_json::Value {
    json!({
        "ace": report.ace,
        "bins": report.bins.iter().map(|b| json!({
            "mean_score": b.mean_score,
            "positive_rate": b.positive_rate,
            "count": b.count,
        })).collect::<Vec<_>>(),
    })
}

#[derive(Serialize)]
struct Row<'a> {
    prediction: u8,
    score: f64,
    label: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    features: Option<&'a [f64]>,
}

/// Writes a batch in the input schema, optionally with feature columns
/// `x0, x1, ...` (which the parser ignores with a warning).
pub fn write_batch<W: Write>(
    mut out: W,
    batch: &PredictionBatch,
    features: Option<&[Vec<f64>]>,
    format: Format,
) -> io::Result<()> {
    match format {
        Format::Csv => {
            let dims = features.and_then(|f| f.first()).map_or(0, |x| x.len());
            write!(out, "prediction,score,label")?;
            for d in 0..dims {
                write!(out, ",x{d}")?;
            }
            writeln!(out)?;
            for (i, r) in batch.records().iter().enumerate() {
                let label = r.label.map(|l| u8::from(l).to_string()).unwrap_or_default();
                write!(out, "{},{},{}", u8::from(r.predicted), r.score, label)?;
                if let Some(f) = features {
                    for x in &f[i] {
                        write!(out, ",{x}")?;
                    }
                }
                writeln!(out)?;
            }
        }
        Format::Jsonl => {
            for (i, r) in batch.records().iter().enumerate() {
                let row = Row {
                    prediction: u8::from(r.predicted),
                    score: r.score,
                    label: r.label.map(u8::from),
                    features: features.map(|f| f[i].as_slice()),
                };
                serde_json::to_writer(&mut out, &row)?;
                writeln!(out)?;
            }
        }
    }
    out.flush()
}

pub fn write_dataset<W: Write>(
    out: W,
    data: &SyntheticDataset,
    with_features: bool,
    format: Format,
) -> io::Result<()> {
    write_batch(
        out,
        &data.batch,
        with_features.then_some(data.features.as_slice()),
        format,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::parse_reader;
    use perfest_core::synthesis::{hypersphere_dataset, HypersphereConfig};

    #[test]
    fn dataset_round_trips_through_parser() {
        let data = hypersphere_dataset(&HypersphereConfig {
            n_points: 300,
            seed: 8,
            ..Default::default()
        })
        .unwrap();
        for format in [Format::Csv, Format::Jsonl] {
            let mut buf = Vec::new();
            write_dataset(&mut buf, &data, false, format).unwrap();
            let parsed = parse_reader(buf.as_slice(), format).unwrap();
            assert_eq!(parsed.batch, data.batch);
            assert!(parsed.warnings.is_empty());
        }
        let mut buf = Vec::new();
        write_dataset(&mut buf, &data, true, Format::Csv).unwrap();
        let parsed = parse_reader(buf.as_slice(), Format::Csv).unwrap();
        assert_eq!(parsed.batch, data.batch);
        assert_eq!(parsed.warnings.len(), 2);
    }
}
