//! CSV and JSONL prediction files.
//!
//! Both formats carry the same fields: `prediction` (0 or 1), `score` (a
//! decimal in [0, 1]) and an optional `label` (0 or 1). CSV files need a
//! header row; JSONL files hold one object per line. Unknown columns or keys
//! are ignored with a warning.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use perfest_core::{PredictionBatch, PredictionRecord};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// Guess from the file extension; anything other than `.jsonl`/`.ndjson` is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "ndjson") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: score {value} is outside [0, 1]")]
    ScoreOutOfRange { line: u64, value: f64 },
    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInput {
    pub batch: PredictionBatch,
    pub warnings: Vec<String>,
}

pub fn parse_input(path: &Path, format: Format) -> Result<ParsedInput, InputError> {
    parse_reader(File::open(path)?, format)
}

pub fn parse_reader<R: Read>(reader: R, format: Format) -> Result<ParsedInput, InputError> {
    match format {
        Format::Csv => parse_csv(reader),
        Format::Jsonl => parse_jsonl(BufReader::new(reader)),
    }
}

fn malformed(line: u64, message: impl Into<String>) -> InputError {
    InputError::Malformed {
        line,
        message: message.into(),
    }
}

fn parse_flag(raw: &str, field: &str, line: u64) -> Result<bool, InputError> {
    match raw {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(malformed(
            line,
            format!("{field} must be 0 or 1, got {other:?}"),
        )),
    }
}

fn checked_record(
    predicted: bool,
    score: f64,
    label: Option<bool>,
    line: u64,
) -> Result<PredictionRecord, InputError> {
    PredictionRecord::with_label(predicted, score, label)
        .map_err(|_| InputError::ScoreOutOfRange { line, value: score })
}

fn parse_csv<R: Read>(reader: R) -> Result<ParsedInput, InputError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers().map_err(|e| csv_error(e, 1))?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let prediction_col = position("prediction").ok_or(InputError::MissingColumn("prediction"))?;
    let score_col = position("score").ok_or(InputError::MissingColumn("score"))?;
    let label_col = position("label");

    let warnings = headers
        .iter()
        .filter(|h| !matches!(*h, "prediction" | "score" | "label"))
        .map(|h| format!("ignoring unknown column {h:?}"))
        .collect();

    let mut records = Vec::new();
    for row in csv.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_error(e, line)
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let predicted = parse_flag(&row[prediction_col], "prediction", line)?;
        let score: f64 = row[score_col]
            .parse()
            .map_err(|_| malformed(line, format!("score {:?} is not a number", &row[score_col])))?;
        let label = match label_col.map(|c| &row[c]) {
            None | Some("") => None,
            Some(raw) => Some(parse_flag(raw, "label", line)?),
        };
        records.push(checked_record(predicted, score, label, line)?);
    }
    Ok(ParsedInput {
        batch: PredictionBatch::new(records),
        warnings,
    })
}

fn csv_error(e: csv::Error, line: u64) -> InputError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => InputError::Io(io),
            _ => unreachable!(),
        }
    } else {
        malformed(line, e.to_string())
    }
}

fn parse_jsonl<R: BufRead>(reader: R) -> Result<ParsedInput, InputError> {
    let mut records = Vec::new();
    let mut unknown = BTreeSet::new();
    for (index, text) in reader.lines().enumerate() {
        let line = index as u64 + 1;
        let text = text?;
        if text.trim().is_empty() {
            continue;
        }
        let object: serde_json::Map<String, Value> =
            serde_json::from_str(&text).map_err(|e| malformed(line, e.to_string()))?;
        for key in object.keys() {
            if !matches!(key.as_str(), "prediction" | "score" | "label") {
                unknown.insert(key.clone());
            }
        }
        let flag = |key: &str| -> Result<Option<bool>, InputError> {
            match object.get(key) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::Number(n)) if n.as_u64() == Some(0) => Ok(Some(false)),
                Some(Value::Number(n)) if n.as_u64() == Some(1) => Ok(Some(true)),
                Some(other) => Err(malformed(
                    line,
                    format!("{key} must be 0 or 1, got {other}"),
                )),
            }
        };
        let predicted = flag("prediction")?.ok_or_else(|| malformed(line, "missing prediction"))?;
        let label = flag("label")?;
        let score = match object.get("score") {
            Some(Value::Number(n)) => n
                .as_f64()
                .ok_or_else(|| malformed(line, "score is not a finite number"))?,
            Some(other) => {
                return Err(malformed(
                    line,
                    format!("score must be a number, got {other}"),
                ))
            }
            None => return Err(malformed(line, "missing score")),
        };
        records.push(checked_record(predicted, score, label, line)?);
    }
    let warnings = unknown
        .into_iter()
        .map(|k| format!("ignoring unknown key {k:?}"))
        .collect();
    Ok(ParsedInput {
        batch: PredictionBatch::new(records),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv(text: &str) -> Result<ParsedInput, InputError> {
        parse_reader(text.as_bytes(), Format::Csv)
    }

    fn jsonl(text: &str) -> Result<ParsedInput, InputError> {
        parse_reader(text.as_bytes(), Format::Jsonl)
    }

    #[test]
    fn csv_and_jsonl_agree() {
        let a = csv("prediction,score\n1,0.8\n0,0.3").unwrap();
        let b =
            jsonl("{\"prediction\":1,\"score\":0.8}\n{\"prediction\":0,\"score\":0.3}\n").unwrap();
        assert_eq!(a.batch.len(), 2);
        assert_eq!(a, b);
        assert!(a.warnings.is_empty());
    }

    #[test]
    fn crlf_and_labels() {
        let p = csv("score,label,prediction\r\n0.9,1,1\r\n0.2,,0\r\n").unwrap();
        let r = p.batch.records();
        assert_eq!(
            (r[0].predicted, r[0].score, r[0].label),
            (true, 0.9, Some(true))
        );
        assert_eq!(r[1].label, None);
    }

    #[test]
    fn score_out_of_range_names_line() {
        let err = csv("prediction,score\n1,1.2").unwrap_err();
        assert!(
            matches!(err, InputError::ScoreOutOfRange { line: 2, .. }),
            "{err}"
        );
        assert_eq!(err.to_string(), "line 2: score 1.2 is outside [0, 1]");
        let err = jsonl("{\"prediction\":1,\"score\":0.5}\n{\"prediction\":0,\"score\":-0.5}")
            .unwrap_err();
        assert!(matches!(err, InputError::ScoreOutOfRange { line: 2, .. }));
    }

    #[test]
    fn malformed_rows_name_line() {
        let err = csv("prediction,score\n1,0.4\n2,0.3\n").unwrap_err();
        assert!(
            matches!(err, InputError::Malformed { line: 3, .. }),
            "{err}"
        );
        let err = csv("prediction,score\n1,abc\n").unwrap_err();
        assert!(matches!(err, InputError::Malformed { line: 2, .. }));
        let err = csv("prediction,score\n1,0.4,7\n").unwrap_err();
        assert!(
            matches!(err, InputError::Malformed { line: 2, .. }),
            "{err}"
        );
        let err = jsonl("{\"prediction\":1,\"score\":0.4}\nnot json\n").unwrap_err();
        assert!(matches!(err, InputError::Malformed { line: 2, .. }));
        let err = jsonl("{\"score\":0.4}\n").unwrap_err();
        assert!(matches!(err, InputError::Malformed { line: 1, .. }));
    }

    #[test]
    fn missing_columns() {
        assert!(matches!(
            csv("prediction\n1\n"),
            Err(InputError::MissingColumn("score"))
        ));
        assert!(matches!(
            csv("score\n0.5\n"),
            Err(InputError::MissingColumn("prediction"))
        ));
    }

    #[test]
    fn unknown_columns_warn() {
        let p = csv("id,prediction,score\n7,1,0.6\n").unwrap();
        assert_eq!(p.warnings, ["ignoring unknown column \"id\""]);
        let p = jsonl(
            "{\"prediction\":1,\"score\":0.6,\"ts\":3}\n{\"prediction\":1,\"score\":0.6,\"ts\":4}",
        )
        .unwrap();
        assert_eq!(p.warnings, ["ignoring unknown key \"ts\""]);
    }

    #[test]
    fn format_from_path() {
        assert_eq!(Format::from_path(Path::new("a.jsonl")), Format::Jsonl);
        assert_eq!(Format::from_path(Path::new("a.csv")), Format::Csv);
        assert_eq!("JSONL".parse::<Format>().unwrap(), Format::Jsonl);
    }
}
