//! Simulation runners: shortcut convergence, interval coverage and the
//! synthetic covariate-shift benchmark.
//!
//! Trials are independent. Each one seeds its own streams from
//! `(master seed, window size, trial index)` and results are reduced in
//! trial order, so the output does not depend on how trials are scheduled.

use perfest_core::synthesis::{
    derive_seed, hypersphere_dataset, random_beta_params, sample_beta_scores, HypersphereConfig,
};
use perfest_core::{
    accuracy_distribution, ace, estimate_all, estimate_confusion, f1_distribution, hdi,
    precision_distribution, recall_distribution, reverse_sample_labels, shortcut_accuracy,
    shortcut_f1, shortcut_precision, shortcut_recall, threshold_predictions, true_metrics,
    DiscreteDistribution, EstimationConfig, Method, Metric, PredictionBatch,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// Sub-stream indices under a trial seed.
const PARAMS_STREAM: u64 = 0;
const SCORES_STREAM: u64 = 1;
const LABELS_STREAM: u64 = 2;

/// Truth values equal to an interval endpoint up to this slack count as covered.
const COVERAGE_SLACK: f64 = 1e-12;

/// Scores, thresholded predictions and (optionally) reverse-sampled labels
/// for one simulated trial.
pub fn simulated_window(
    window: usize,
    trial_seed: u64,
    threshold: f64,
    with_labels: bool,
) -> PredictionBatch {
    let params = random_beta_params(derive_seed(trial_seed, PARAMS_STREAM));
    let scores = sample_beta_scores(window, params, derive_seed(trial_seed, SCORES_STREAM))
        .expect("random beta parameters are valid");
    let predictions = threshold_predictions(&scores, threshold);
    if with_labels {
        let labels = reverse_sample_labels(&scores, derive_seed(trial_seed, LABELS_STREAM))
            .expect("beta scores lie in [0, 1]");
        PredictionBatch::from_labelled_parts(&predictions, &scores, &labels)
    } else {
        PredictionBatch::from_parts(&predictions, &scores)
    }
    .expect("beta scores lie in [0, 1]")
}

fn trial_seed(master: u64, window: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(master, window as u64), trial as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    pub window_sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            window_sizes: vec![10, 50, 100, 200, 500],
            trials: 1000,
            seed: 0,
            threshold: 0.5,
        }
    }
}

/// Error statistics of `exact expectation - shortcut` for one window size
/// and metric. Accuracy and precision rows are controls: their shortcuts are
/// exact, so their errors sit at roundoff level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub window: usize,
    pub metric: String,
    /// Trials in which the metric was defined.
    pub trials: usize,
    pub mean_error: f64,
    pub mean_abs_error: f64,
    pub std_error: f64,
}

/// Exact minus shortcut expectation for each metric, `None` where undefined.
pub fn shortcut_errors(batch: &PredictionBatch) -> [Option<f64>; 4] {
    let confusion = estimate_confusion(batch).expect("nonempty window");
    let accuracy = accuracy_distribution(batch)
        .expect("nonempty window")
        .expectation();
    let recall = recall_distribution(&confusion).expectation();
    let precision = precision_distribution(&confusion)
        .ok()
        .map(|d| d.expectation());
    let f1 = f1_distribution(&confusion).ok().map(|d| d.expectation());
    [
        shortcut_accuracy(batch).ok().map(|s| accuracy - s),
        precision
            .zip(shortcut_precision(batch).ok())
            .map(|(e, s)| e - s),
        shortcut_recall(batch).ok().map(|s| recall - s),
        f1.zip(shortcut_f1(batch).ok()).map(|(e, s)| e - s),
    ]
}

pub fn run_convergence_experiment(config: &ConvergenceConfig) -> Vec<ConvergenceRow> {
    let mut rows = Vec::new();
    for &window in &config.window_sizes {
        let errors: Vec<[Option<f64>; 4]> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let batch = simulated_window(
                    window,
                    trial_seed(config.seed, window, t),
                    config.threshold,
                    false,
                );
                shortcut_errors(&batch)
            })
            .collect();
        for (k, metric) in Metric::ALL.iter().enumerate() {
            let values: Vec<f64> = errors.iter().filter_map(|e| e[k]).collect();
            let stats = ErrorStats::of(&values);
            rows.push(ConvergenceRow {
                window,
                metric: metric.name().to_string(),
                trials: values.len(),
                mean_error: stats.mean,
                mean_abs_error: stats.mean_abs,
                std_error: stats.std,
            });
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ErrorStats {
    mean: f64,
    mean_abs: f64,
    std: f64,
}

impl ErrorStats {
    fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return ErrorStats {
                mean: f64::NAN,
                mean_abs: f64::NAN,
                std: f64::NAN,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mean_abs = values.iter().map(|v| v.abs()).sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        ErrorStats {
            mean,
            mean_abs,
            std,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageConfig {
    pub window_sizes: Vec<usize>,
    pub trials: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            window_sizes: vec![100, 300, 500],
            trials: 2000,
            alphas: vec![0.05, 0.10],
            seed: 0,
            threshold: 0.5,
        }
    }
}

/// Fraction of trials whose realised metric fell inside the `1 - alpha` HDI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub window: usize,
    pub metric: String,
    pub alpha: f64,
    /// Trials in which both the estimate and the realised metric were defined.
    pub trials: usize,
    pub covered: usize,
    pub coverage: f64,
}

fn metric_distributions(batch: &PredictionBatch) -> [Option<DiscreteDistribution>; 4] {
    let confusion = estimate_confusion(batch).expect("nonempty window");
    [
        accuracy_distribution(batch).ok(),
        precision_distribution(&confusion).ok(),
        Some(recall_distribution(&confusion)),
        f1_distribution(&confusion).ok(),
    ]
}

pub fn run_coverage_experiment(config: &CoverageConfig) -> perfest_core::Result<Vec<CoverageRow>> {
    for &alpha in &config.alphas {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(perfest_core::Error::InvalidAlpha(alpha));
        }
    }
    let mut rows = Vec::new();
    for &window in &config.window_sizes {
        // outcomes[trial][metric][alpha] = Some(covered) when defined
        let outcomes: Vec<[Vec<Option<bool>>; 4]> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let batch = simulated_window(
                    window,
                    trial_seed(config.seed, window, t),
                    config.threshold,
                    true,
                );
                let truth = true_metrics(&batch).expect("labelled window");
                let dists = metric_distributions(&batch);
                Metric::ALL.map(|metric| {
                    let dist = &dists[metric as usize];
                    config
                        .alphas
                        .iter()
                        .map(|&alpha| {
                            let (dist, value) = (dist.as_ref()?, truth.get(metric)?);
                            let h = hdi(dist, alpha).expect("alpha validated");
                            Some(
                                h.lower - COVERAGE_SLACK <= value
                                    && value <= h.upper + COVERAGE_SLACK,
                            )
                        })
                        .collect()
                })
            })
            .collect();
        for metric in Metric::ALL {
            for (a, &alpha) in config.alphas.iter().enumerate() {
                let defined: Vec<bool> = outcomes
                    .iter()
                    .filter_map(|o| o[metric as usize][a])
                    .collect();
                let covered = defined.iter().filter(|&&c| c).count();
                rows.push(CoverageRow {
                    window,
                    metric: metric.name().to_string(),
                    alpha,
                    trials: defined.len(),
                    covered,
                    coverage: covered as f64 / defined.len() as f64,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftConfig {
    /// Source split configuration; the target split swaps its pool proportions.
    pub dataset: HypersphereConfig,
    pub window_size: usize,
    pub windows: usize,
    pub method: Method,
    pub ace_bins: usize,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        ShiftConfig {
            dataset: HypersphereConfig::default(),
            window_size: 1000,
            windows: 200,
            method: Method::Exact,
            ace_bins: perfest_core::calibration::DEFAULT_ACE_BINS,
        }
    }
}

/// Estimation error of one metric on one split, measured against the
/// metric's value over the whole split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub split: String,
    pub metric: String,
    pub windows: usize,
    pub prevalence: f64,
    pub ace: f64,
    pub true_value: f64,
    pub mean_error: f64,
    pub mean_abs_error: f64,
    pub std_error: f64,
}

/// Draws random windows from the source and the covariate-shifted split of
/// the hypersphere data and scores each estimate against the split-wide
/// metric.
pub fn run_shift_experiment(config: &ShiftConfig) -> perfest_core::Result<Vec<ShiftRow>> {
    let source = config.dataset.clone();
    let target = HypersphereConfig {
        seed: derive_seed(source.seed, 1),
        ..source.shifted()
    };
    let mut rows = Vec::new();
    for (split_index, (name, dataset_config)) in [("source", source), ("shifted", target)]
        .into_iter()
        .enumerate()
    {
        let data = hypersphere_dataset(&dataset_config)?;
        if config.window_size == 0 || config.window_size > data.len() {
            return Err(perfest_core::Error::InvalidParameter(
                "window size must lie in 1..=n_points",
            ));
        }
        let truth = true_metrics(&data.batch)?;
        let calibration = ace(&data.batch, config.ace_bins)?;
        let prevalence = (truth.counts.tp + truth.counts.fn_) as f64 / data.len() as f64;
        let estimation = EstimationConfig {
            metrics: Metric::ALL.to_vec(),
            method: config.method,
            alpha: None,
        };
        let split_seed = derive_seed(dataset_config.seed, 100 + split_index as u64);

        let estimates: Vec<Vec<Option<f64>>> = (0..config.windows)
            .into_par_iter()
            .map(|w| {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(split_seed, w as u64));
                let indices = rand::seq::index::sample(&mut rng, data.len(), config.window_size);
                let window: PredictionBatch =
                    indices.iter().map(|i| data.batch.records()[i]).collect();
                estimate_all(&window, &estimation)
                    .map(|est| est.into_iter().map(|e| e.point).collect())
            })
            .collect::<perfest_core::Result<_>>()?;

        for metric in Metric::ALL {
            let Some(true_value) = truth.get(metric) else {
                continue;
            };
            let errors: Vec<f64> = estimates
                .iter()
                .filter_map(|e| e[metric as usize])
                .map(|p| p - true_value)
                .collect();
            let stats = ErrorStats::of(&errors);
            rows.push(ShiftRow {
                split: name.to_string(),
                metric: metric.name().to_string(),
                windows: errors.len(),
                prevalence,
                ace: calibration.ace,
                true_value,
                mean_error: stats.mean,
                mean_abs_error: stats.mean_abs,
                std_error: stats.std,
            });
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with a header.
pub fn write_csv<W: std::io::Write, T: Serialize>(writer: W, rows: &[T]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for row in rows {
        out.serialize(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read, T: for<'de> Deserialize<'de>>(reader: R) -> csv::Result<Vec<T>> {
    csv::Reader::from_reader(reader).deserialize().collect()
}
