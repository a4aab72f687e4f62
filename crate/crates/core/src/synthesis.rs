//! Synthetic score and dataset generators.
//!
//! All generators are deterministic in their seed. Independent trials take
//! their seeds from [`derive_seed`], so they can run in any order or in
//! parallel and still reproduce.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::calibration::threshold_predictions;
use crate::confusion::{PredictionBatch, PredictionRecord};
use crate::error::{Error, Result};

/// Range from which random beta shape parameters are drawn.
pub const BETA_SHAPE_RANGE: (f64, f64) = (0.1, 10.0);

/// Seed of stream `index` under `master`.
///
/// The counter scheme is `splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15)`,
/// i.e. the `index + 1`-th output of a SplitMix64 generator started at
/// `master`. Nesting it (`derive_seed(derive_seed(m, a), b)`) gives
/// hierarchical streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub alpha_shape: f64,
    pub beta_shape: f64,
}

impl BetaParams {
    pub fn new(alpha_shape: f64, beta_shape: f64) -> Result<Self> {
        if !(alpha_shape > 0.0 && beta_shape > 0.0)
            || !alpha_shape.is_finite()
            || !beta_shape.is_finite()
        {
            return Err(Error::InvalidParameter(
                "beta shape parameters must be positive and finite",
            ));
        }
        Ok(BetaParams {
            alpha_shape,
            beta_shape,
        })
    }

    pub fn mean(&self) -> f64 {
        self.alpha_shape / (self.alpha_shape + self.beta_shape)
    }
}

/// Both shapes uniform on `[0.1, 10]`.
pub fn random_beta_params(seed: u64) -> BetaParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = BETA_SHAPE_RANGE;
    BetaParams {
        alpha_shape: rng.random_range(lo..=hi),
        beta_shape: rng.random_range(lo..=hi),
    }
}

pub fn sample_beta_scores(n: usize, params: BetaParams, seed: u64) -> Result<Vec<f64>> {
    let beta = Beta::new(params.alpha_shape, params.beta_shape).map_err(|_| {
        Error::InvalidParameter("beta shape parameters must be positive and finite")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| beta.sample(&mut rng).clamp(0.0, 1.0))
        .collect())
}

/// Probability of a positive label at distance `distance` from the sphere:
/// `exp(-lambda * distance^2)`.
///
/// This is the single labelling function shared by the source and shifted
/// datasets, and it is also the score of the Bayes-calibrated classifier.
pub fn label_probability(distance: f64, lambda: f64) -> f64 {
    libm::exp(-lambda * distance * distance)
}

/// Distance from the sphere at which [`label_probability`] equals `p`.
pub fn distance_for_probability(p: f64, lambda: f64) -> f64 {
    libm::sqrt(-libm::log(p) / lambda)
}

/// Configuration for the hypersphere dataset.
///
/// Points lie at `radius ± d` along a uniformly random direction. Easy points
/// have `d` uniform over `[0, d(0.9)] ∪ [d(0.1), d(0.01)]`, where `d(p)` is the
/// distance at which the label probability is `p`, so their label
/// probability is at least 0.9 or at most 0.1. Hard points have `d` uniform
/// on `[d(0.6), d(0.4)]`. The offset points outward with probability
/// `outward_probability`, and always outward when an inward offset would
/// pass the centre.
#[derive(Debug, Clone, PartialEq)]
pub struct HypersphereConfig {
    pub n_dims: usize,
    pub radius: f64,
    pub lambda: f64,
    pub easy_fraction: f64,
    pub n_points: usize,
    pub outward_probability: f64,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for HypersphereConfig {
    fn default() -> Self {
        HypersphereConfig {
            n_dims: 2,
            radius: 3.0,
            lambda: core::f64::consts::LN_2 / 2.0,
            easy_fraction: 0.8,
            n_points: 100_000,
            outward_probability: 0.55,
            threshold: 0.5,
            seed: 0,
        }
    }
}

impl HypersphereConfig {
    fn validate(&self) -> Result<()> {
        if self.n_dims == 0 {
            return Err(Error::InvalidParameter("n_dims must be at least 1"));
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return Err(Error::InvalidParameter("radius must be positive"));
        }
        if self.lambda.is_nan() || self.lambda <= 0.0 {
            return Err(Error::InvalidParameter("lambda must be positive"));
        }
        if !(0.0..=1.0).contains(&self.easy_fraction) {
            return Err(Error::InvalidParameter("easy_fraction must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.outward_probability) {
            return Err(Error::InvalidParameter(
                "outward_probability must lie in [0, 1]",
            ));
        }
        Ok(())
    }

    /// The same configuration with the easy and hard proportions swapped.
    pub fn shifted(&self) -> Self {
        HypersphereConfig {
            easy_fraction: 1.0 - self.easy_fraction,
            ..self.clone()
        }
    }
}

/// A generated dataset with its feature vectors retained.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub features: Vec<Vec<f64>>,
    /// Distance of each point from the sphere surface.
    pub distances: Vec<f64>,
    pub easy: Vec<bool>,
    /// Scores are the analytic label probabilities, predictions threshold
    /// them and labels are drawn from them.
    pub batch: PredictionBatch,
}

impl SyntheticDataset {
    pub fn len(&self) -> usize {
        self.batch.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batch.is_empty()
    }
}

pub fn hypersphere_dataset(config: &HypersphereConfig) -> Result<SyntheticDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let lambda = config.lambda;
    let near = distance_for_probability(0.9, lambda);
    let far = (
        distance_for_probability(0.1, lambda),
        distance_for_probability(0.01, lambda),
    );
    let hard = (
        distance_for_probability(0.6, lambda),
        distance_for_probability(0.4, lambda),
    );

    let n_easy = libm::round(config.easy_fraction * config.n_points as f64) as usize;
    let mut easy: Vec<bool> = (0..config.n_points).map(|i| i < n_easy).collect();
    easy.shuffle(&mut rng);

    let mut features = Vec::with_capacity(config.n_points);
    let mut distances = Vec::with_capacity(config.n_points);
    let mut scores = Vec::with_capacity(config.n_points);
    for &is_easy in &easy {
        let offset = if is_easy {
            let near_len = near;
            let far_len = far.1 - far.0;
            let u = rng.random::<f64>() * (near_len + far_len);
            if u < near_len {
                u
            } else {
                far.0 + (u - near_len)
            }
        } else {
            rng.random_range(hard.0..=hard.1)
        };
        let outward = rng.random::<f64>() < config.outward_probability || offset > config.radius;
        let norm = if outward {
            config.radius + offset
        } else {
            config.radius - offset
        };

        let point = random_direction(config.n_dims, &mut rng)
            .into_iter()
            .map(|c| c * norm)
            .collect::<Vec<_>>();
        let distance = (libm::sqrt(point.iter().map(|c| c * c).sum::<f64>()) - config.radius).abs();
        features.push(point);
        distances.push(distance);
        scores.push(label_probability(distance, lambda));
    }

    let predictions = threshold_predictions(&scores, config.threshold);
    let labels = crate::calibration::sample_labels_with(&scores, &mut rng)?;
    let batch = PredictionBatch::new(
        predictions
            .iter()
            .zip(&scores)
            .zip(&labels)
            .map(|((&p, &s), &l)| PredictionRecord {
                predicted: p,
                score: s,
                label: Some(l),
            })
            .collect(),
    );
    Ok(SyntheticDataset {
        features,
        distances,
        easy,
        batch,
    })
}

/// Dataset with the easy and hard proportions of `config` swapped. The
/// labelling function is unchanged, so only the covariates shift.
pub fn shift_dataset(config: &HypersphereConfig) -> Result<SyntheticDataset> {
    hypersphere_dataset(&config.shifted())
}

fn random_direction<R: Rng + ?Sized>(n_dims: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n_dims)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = libm::sqrt(v.iter().map(|c| c * c).sum::<f64>());
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}
