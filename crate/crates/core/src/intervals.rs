//! Highest-density intervals over a finite metric distribution.

use alloc::vec::Vec;

use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdiInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    /// Probability mass of the support values inside `[lower, upper]`.
    pub covered_mass: f64,
}

impl HdiInterval {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Narrows the full support to a `1 - alpha` interval with two pointers.
///
/// With the support sorted by value, the endpoint carrying less mass is
/// dropped for as long as the dropped tail stays below `alpha`. On equal
/// endpoint masses the upper endpoint is the one considered. The search
/// stops at the first endpoint that cannot be dropped.
///
/// For unimodal distributions the result is the shortest run of support
/// points holding at least `1 - alpha` of the mass. For multimodal ones it
/// is a single contiguous interval and may be wider than that.
pub fn hdi(d: &DiscreteDistribution, alpha: f64) -> Result<HdiInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if d.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let sorted: Vec<(f64, f64)> = d.iter().map(|(v, p)| (v.to_f64(), p)).collect();

    let mut lower = 0;
    let mut upper = sorted.len() - 1;
    let mut tail = 0.0;
    // lower == upper only happens when roundoff leaves the total mass
    // short of alpha; a single point cannot be narrowed further.
    while lower < upper {
        let p_lower = sorted[lower].1;
        let p_upper = sorted[upper].1;
        if p_lower < p_upper {
            if tail + p_lower < alpha {
                tail += p_lower;
                lower += 1;
            } else {
                break;
            }
        } else if tail + p_upper < alpha {
            tail += p_upper;
            upper -= 1;
        } else {
            break;
        }
    }

    Ok(HdiInterval {
        lower: sorted[lower].0,
        upper: sorted[upper].0,
        alpha,
        covered_mass: sorted[lower..=upper].iter().map(|e| e.1).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use proptest::prelude::*;

    fn dist(pairs: &[(i64, i64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::from_masses(pairs.iter().map(|&(n, d, p)| (Rational::new(n, d), p)))
            .unwrap()
    }

    #[test]
    fn drops_light_lower_tail() {
        let d = dist(&[(0, 1, 0.02), (1, 2, 0.9), (1, 1, 0.08)]);
        let h = hdi(&d, 0.05).unwrap();
        assert_eq!((h.lower, h.upper), (0.5, 1.0));
        assert!((h.covered_mass - 0.98).abs() < 1e-12);
    }

    #[test]
    fn point_mass() {
        let d = DiscreteDistribution::point_mass(Rational::new(7, 10));
        for alpha in [0.01, 0.5, 0.99] {
            let h = hdi(&d, alpha).unwrap();
            assert_eq!((h.lower, h.upper, h.covered_mass), (0.7, 0.7, 1.0));
        }
    }

    #[test]
    fn ties_drop_upper_endpoint() {
        let d = dist(&[(0, 1, 0.25), (1, 3, 0.25), (2, 3, 0.25), (1, 1, 0.25)]);
        let h = hdi(&d, 0.3).unwrap();
        assert_eq!(h.lower, 0.0);
        assert!((h.upper - 2.0 / 3.0).abs() < 1e-15);
        assert!((h.covered_mass - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_alpha() {
        let d = DiscreteDistribution::point_mass(Rational::integer(0));
        for alpha in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(hdi(&d, alpha), Err(Error::InvalidAlpha(_))));
        }
    }

    #[test]
    fn greedy_can_miss_the_shortest_run_on_bimodal_input() {
        // Dropping the light upper endpoint first blocks the cheaper route
        // of discarding the whole lower shoulder.
        let probs = [0.09, 0.01, 0.01, 0.01, 0.01, 0.01, 0.78, 0.08];
        let d = DiscreteDistribution::from_masses(
            probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (Rational::integer(i as i64), p)),
        )
        .unwrap();
        let h = hdi(&d, 0.15).unwrap();
        assert_eq!((h.lower, h.upper), (0.0, 6.0));
        assert!(h.covered_mass >= 0.85);
    }

    fn random_distribution() -> impl Strategy<Value = DiscreteDistribution> {
        prop::collection::vec(0.001..1.0f64, 1..30).prop_map(|weights| {
            let total: f64 = weights.iter().sum();
            DiscreteDistribution::from_masses(
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| (Rational::new(i as i64, 29), w / total)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn covers_requested_mass(d in random_distribution(), alpha in 0.001..0.999f64) {
            let h = hdi(&d, alpha).unwrap();
            prop_assert!(h.lower <= h.upper);
            prop_assert!(h.covered_mass >= 1.0 - alpha - 1e-12);
        }

        #[test]
        fn nested_in_alpha(d in random_distribution(), a in 0.001..0.999f64, b in 0.001..0.999f64) {
            let (small, large) = if a < b { (a, b) } else { (b, a) };
            let wide = hdi(&d, small).unwrap();
            let narrow = hdi(&d, large).unwrap();
            prop_assert!(wide.lower <= narrow.lower && narrow.upper <= wide.upper);
        }
    }
}
