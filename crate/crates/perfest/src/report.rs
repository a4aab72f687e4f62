//! Per-window estimation and the JSON report format.

use perfest_core::{estimate_all, EstimationConfig, Metric, MetricEstimate, PredictionBatch};
use serde::Serialize;

/// Estimates for one monitoring window.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitoringReport {
    pub window_index: usize,
    pub window_size: usize,
    /// The trailing window holding fewer than the requested number of records.
    pub partial: bool,
    pub estimates: Vec<MetricEstimate>,
    pub undefined_metrics: Vec<Metric>,
}

/// Splits `batch` into consecutive windows of `window_size` records and
/// estimates each one. A final shorter window is processed and flagged
/// `partial`.
pub fn windowed_estimates(
    batch: &PredictionBatch,
    window_size: usize,
    config: &EstimationConfig,
) -> perfest_core::Result<Vec<MonitoringReport>> {
    if window_size == 0 {
        return Err(perfest_core::Error::InvalidParameter(
            "window size must be at least 1",
        ));
    }
    let n = batch.len();
    (0..n.div_ceil(window_size))
        .map(|window_index| {
            let start = window_index * window_size;
            let end = (start + window_size).min(n);
            let window = batch.slice(start, end);
            let estimates = estimate_all(&window, config)?;
            let undefined_metrics = estimates
                .iter()
                .filter(|e| e.is_undefined())
                .map(|e| e.metric)
                .collect();
            Ok(MonitoringReport {
                window_index,
                window_size: end - start,
                partial: end - start < window_size,
                estimates,
                undefined_metrics,
            })
        })
        .collect()
}

/// Echo of the run configuration written into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub metrics: Vec<&'static str>,
    pub method: &'static str,
    pub alpha: Option<f64>,
    pub threshold: Option<f64>,
    pub window_size: usize,
    pub emit_distributions: bool,
}

impl ConfigEcho {
    pub fn new(
        config: &EstimationConfig,
        threshold: Option<f64>,
        window_size: usize,
        emit_distributions: bool,
    ) -> Self {
        ConfigEcho {
            metrics: config.metrics.iter().map(|m| m.name()).collect(),
            method: config.method.name(),
            alpha: config.alpha,
            threshold,
            window_size,
            emit_distributions,
        }
    }
}

#[derive(Debug, Serialize)]
struct RunReportJson<'a> {
    windows: Vec<WindowJson>,
    config: &'a ConfigEcho,
}

#[derive(Debug, Serialize)]
struct WindowJson {
    window_index: usize,
    window_size: usize,
    partial: bool,
    estimates: Vec<EstimateJson>,
    undefined_metrics: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
struct EstimateJson {
    metric: &'static str,
    method: &'static str,
    point: Option<f64>,
    undefined: bool,
    hdi: Option<HdiJson>,
    /// `[numerator, denominator, probability]` triples in ascending value order.
    distribution: Option<Vec<(i64, i64, f64)>>,
}

#[derive(Debug, Serialize)]
struct HdiJson {
    lower: f64,
    upper: f64,
    alpha: f64,
}

/// Serialises a run as one pretty-printed JSON document.
pub fn render_json(
    reports: &[MonitoringReport],
    config: &ConfigEcho,
) -> serde_json::Result<String> {
    let windows = reports
        .iter()
        .map(|r| WindowJson {
            window_index: r.window_index,
            window_size: r.window_size,
            partial: r.partial,
            undefined_metrics: r.undefined_metrics.iter().map(|m| m.name()).collect(),
            estimates: r
                .estimates
                .iter()
                .map(|e| EstimateJson {
                    metric: e.metric.name(),
                    method: e.method.name(),
                    point: e.point,
                    undefined: e.is_undefined(),
                    hdi: e.hdi.map(|h| HdiJson {
                        lower: h.lower,
                        upper: h.upper,
                        alpha: h.alpha,
                    }),
                    distribution: e
                        .distribution
                        .as_ref()
                        .filter(|_| config.emit_distributions)
                        .map(|d| d.iter().map(|(v, p)| (v.numer(), v.denom(), p)).collect()),
                })
                .collect(),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&RunReportJson { windows, config })?;
    text.push('\n');
    Ok(text)
}
