//! Finite discrete distributions with exact rational support.
//!
//! Confusion-matrix counts and the metrics derived from them all live on a
//! finite set of rational values. Keys are reduced fractions so that equal
//! values reached through different count pairs (1/2 from 1/(1+1) and
//! 2/(2+2)) merge into a single entry.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Tolerance on the total probability mass of every distribution.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// Largest total-mass shift tolerated when renormalising a PMF computed
/// through the characteristic function.
const RENORMALIZATION_LIMIT: f64 = 1e-8;

/// A probability mass function over rational values.
///
/// Values with zero probability are not stored; [`probability`] returns 0
/// for them.
///
/// [`probability`]: DiscreteDistribution::probability
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    masses: BTreeMap<Rational, f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, probability)` pairs, merging
    /// repeated values.
    pub fn from_masses<I>(masses: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, f64)>,
    {
        let mut map = BTreeMap::new();
        for (value, probability) in masses {
            if probability.is_nan() || probability < 0.0 || probability.is_infinite() {
                return Err(Error::NegativeProbability { value, probability });
            }
            *map.entry(value).or_insert(0.0) += probability;
        }
        let dist = Self::from_map(map);
        if dist.masses.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let total = dist.total_mass();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(dist)
    }

    /// PMF over the counts `0..pmf.len()`.
    pub fn from_count_pmf(pmf: &[f64]) -> Result<Self> {
        Self::from_masses(
            pmf.iter()
                .enumerate()
                .map(|(k, &p)| (Rational::integer(k as i64), p)),
        )
    }

    pub fn point_mass(value: Rational) -> Self {
        let mut masses = BTreeMap::new();
        masses.insert(value, 1.0);
        DiscreteDistribution { masses }
    }

    /// Internal constructor for maps whose entries are already known to be
    /// non-negative and normalised.
    pub(crate) fn from_map(mut masses: BTreeMap<Rational, f64>) -> Self {
        masses.retain(|_, p| *p != 0.0);
        DiscreteDistribution { masses }
    }

    pub fn probability(&self, value: Rational) -> f64 {
        self.masses.get(&value).copied().unwrap_or(0.0)
    }

    /// Probability of the integer count `k`.
    pub fn count_probability(&self, k: u64) -> f64 {
        self.probability(Rational::integer(k as i64))
    }

    /// Entries in ascending order of value.
    pub fn iter(
        &self,
    ) -> impl DoubleEndedIterator<Item = (Rational, f64)> + ExactSizeIterator + '_ {
        self.masses.iter().map(|(v, p)| (*v, *p))
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn min_value(&self) -> Option<Rational> {
        self.masses.keys().next().copied()
    }

    pub fn max_value(&self) -> Option<Rational> {
        self.masses.keys().next_back().copied()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn expectation(&self) -> f64 {
        self.masses.iter().map(|(v, p)| v.to_f64() * p).sum()
    }

    /// Variance, clamped at zero against roundoff.
    pub fn variance(&self) -> f64 {
        let second: f64 = self
            .masses
            .iter()
            .map(|(v, p)| {
                let x = v.to_f64();
                x * x * p
            })
            .sum();
        let mean = self.expectation();
        (second - mean * mean).max(0.0)
    }

    /// Distribution of `m - X` for a count variable `X` supported on `0..=m`.
    pub fn complement_count(&self, m: u64) -> Result<Self> {
        let bound = Rational::integer(m as i64);
        let mut masses = BTreeMap::new();
        for (value, p) in self.iter() {
            if !value.is_integer() || value.numer() < 0 || value > bound {
                return Err(Error::SupportOutOfRange { value, bound: m });
            }
            masses.insert(Rational::integer(m as i64 - value.numer()), p);
        }
        Ok(DiscreteDistribution { masses })
    }

    /// Distribution of `X / divisor` for a count variable `X`.
    pub(crate) fn scale_counts(&self, divisor: u64) -> Self {
        let mut masses = BTreeMap::new();
        for (value, p) in self.iter() {
            *masses
                .entry(Rational::new(value.numer(), divisor as i64))
                .or_insert(0.0) += p;
        }
        DiscreteDistribution { masses }
    }

    /// Total variation distance, `0.5 * sum |p - q|` over the union of supports.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        for (v, p) in self.iter() {
            sum += (p - other.probability(v)).abs();
        }
        for (v, q) in other.iter() {
            if !self.masses.contains_key(&v) {
                sum += q;
            }
        }
        0.5 * sum
    }
}

fn validate_params(params: &[f64]) -> Result<()> {
    for (index, &value) in params.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ProbabilityOutOfRange { index, value });
        }
    }
    Ok(())
}

/// Poisson binomial PMF by iterated convolution with each Bernoulli factor.
///
/// Quadratic in the number of parameters. This is the reference method; the
/// empty parameter list gives a point mass at zero.
pub fn poisson_binomial_dp(params: &[f64]) -> Result<DiscreteDistribution> {
    validate_params(params)?;
    let mut pmf = vec![0.0; params.len() + 1];
    pmf[0] = 1.0;
    for (done, &p) in params.iter().enumerate() {
        let q = 1.0 - p;
        for k in (1..=done + 1).rev() {
            pmf[k] = pmf[k] * q + pmf[k - 1] * p;
        }
        pmf[0] *= q;
    }
    Ok(DiscreteDistribution::from_map(count_map(&pmf)))
}

/// Poisson binomial PMF recovered from its characteristic function.
///
/// The characteristic function is evaluated at the `n + 1` roots of unity
/// and inverted with a discrete Fourier transform. Both steps are O(n^2);
/// conjugate symmetry halves the first. Roundoff negatives are clamped to
/// zero and the result renormalised.
pub fn poisson_binomial_cf(params: &[f64]) -> Result<DiscreteDistribution> {
    validate_params(params)?;
    let n = params.len();
    let size = n + 1;
    let omega = 2.0 * core::f64::consts::PI / size as f64;
    let twiddles: Vec<Complex64> = (0..size)
        .map(|t| {
            let angle = omega * t as f64;
            Complex64::new(libm::cos(angle), libm::sin(angle))
        })
        .collect();

    // chi[l] = prod_j (1 - p_j + p_j e^{i omega l})
    let mut chi = vec![Complex64::new(0.0, 0.0); size];
    chi[0] = Complex64::new(1.0, 0.0);
    for l in 1..=size / 2 {
        let z = twiddles[l];
        let mut acc = Complex64::new(1.0, 0.0);
        for &p in params {
            acc *= Complex64::new(1.0 - p + p * z.re, p * z.im);
        }
        chi[l] = acc;
        chi[size - l] = acc.conj();
    }

    let mut pmf = vec![0.0; size];
    for (k, slot) in pmf.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (l, c) in chi.iter().enumerate() {
            // Re(chi[l] * e^{-i omega l k})
            let w = twiddles[(l * k) % size];
            acc += c.re * w.re + c.im * w.im;
        }
        *slot = acc / size as f64;
    }

    let mut clamped_total = 0.0;
    for p in pmf.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
        clamped_total += *p;
    }
    let drift = (clamped_total - 1.0).abs();
    if drift > RENORMALIZATION_LIMIT {
        return Err(Error::RenormalizationDrift(drift));
    }
    for p in pmf.iter_mut() {
        *p /= clamped_total;
    }
    Ok(DiscreteDistribution::from_map(count_map(&pmf)))
}

fn count_map(pmf: &[f64]) -> BTreeMap<Rational, f64> {
    pmf.iter()
        .enumerate()
        .map(|(k, &p)| (Rational::integer(k as i64), p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts(pairs: &[(i64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::from_masses(pairs.iter().map(|&(k, p)| (Rational::integer(k), p)))
            .unwrap()
    }

    fn assert_close(d: &DiscreteDistribution, expected: &[(Rational, f64)], tol: f64) {
        for &(v, p) in expected {
            assert!(
                (d.probability(v) - p).abs() <= tol,
                "P({v}) = {} expected {p}",
                d.probability(v)
            );
        }
        let expected_keys: Vec<Rational> =
            expected.iter().filter(|e| e.1 > 0.0).map(|e| e.0).collect();
        for (v, p) in d.iter() {
            assert!(
                expected_keys.contains(&v) || p <= tol,
                "unexpected mass {p} at {v}"
            );
        }
    }

    /// Enumerates all 2^n outcomes of the Bernoulli vector.
    fn brute_force_pmf(params: &[f64]) -> Vec<f64> {
        let n = params.len();
        let mut pmf = vec![0.0; n + 1];
        for mask in 0u32..(1 << n) {
            let mut prob = 1.0;
            for (i, &p) in params.iter().enumerate() {
                prob *= if mask & (1 << i) != 0 { p } else { 1.0 - p };
            }
            pmf[mask.count_ones() as usize] += prob;
        }
        pmf
    }

    fn r(k: i64) -> Rational {
        Rational::integer(k)
    }

    #[test]
    fn dp_two_parameters() {
        let d = poisson_binomial_dp(&[0.8, 0.6]).unwrap();
        assert_close(&d, &[(r(0), 0.08), (r(1), 0.44), (r(2), 0.48)], 1e-15);
    }

    #[test]
    fn dp_edge_cases() {
        assert_eq!(
            poisson_binomial_dp(&[]).unwrap(),
            DiscreteDistribution::point_mass(r(0))
        );
        assert_eq!(
            poisson_binomial_dp(&[1.0, 1.0, 1.0]).unwrap(),
            DiscreteDistribution::point_mass(r(3))
        );
        assert_eq!(
            poisson_binomial_dp(&[0.0]).unwrap(),
            DiscreteDistribution::point_mass(r(0))
        );
    }

    #[test]
    fn out_of_range_parameter_names_index() {
        let err = poisson_binomial_dp(&[0.2, 1.5, 0.1]).unwrap_err();
        assert_eq!(
            err,
            Error::ProbabilityOutOfRange {
                index: 1,
                value: 1.5
            }
        );
        let err = poisson_binomial_cf(&[-0.1]).unwrap_err();
        assert_eq!(
            err,
            Error::ProbabilityOutOfRange {
                index: 0,
                value: -0.1
            }
        );
        assert!(poisson_binomial_dp(&[f64::NAN]).is_err());
    }

    #[test]
    fn cf_matches_examples() {
        let d = poisson_binomial_cf(&[0.8, 0.6]).unwrap();
        assert_close(&d, &[(r(0), 0.08), (r(1), 0.44), (r(2), 0.48)], 1e-9);
        // 12870 / 65536
        let d = poisson_binomial_cf(&[0.5; 16]).unwrap();
        assert!((d.count_probability(8) - 0.196380615234375).abs() < 1e-12);
        let d = poisson_binomial_cf(&[0.0]).unwrap();
        assert!((d.count_probability(0) - 1.0).abs() < 1e-12);
        assert!(d.count_probability(1) < 1e-12);
        let d = poisson_binomial_cf(&[]).unwrap();
        assert_eq!(d, DiscreteDistribution::point_mass(r(0)));
    }

    #[test]
    fn expectation_and_variance() {
        let d = counts(&[(0, 0.08), (1, 0.44), (2, 0.48)]);
        assert!((d.expectation() - 1.4).abs() < 1e-12);
        assert!((d.variance() - 0.4).abs() < 1e-12);
        let point = DiscreteDistribution::point_mass(Rational::new(7, 10));
        assert!((point.expectation() - 0.7).abs() < 1e-15);
        assert_eq!(point.variance(), 0.0);
        let coin = counts(&[(0, 0.5), (1, 0.5)]);
        assert_eq!(coin.expectation(), 0.5);
        assert_eq!(coin.variance(), 0.25);
    }

    #[test]
    fn complement_reflects_keys() {
        let d = counts(&[(0, 0.08), (1, 0.44), (2, 0.48)]);
        let c = d.complement_count(2).unwrap();
        assert_close(&c, &[(r(0), 0.48), (r(1), 0.44), (r(2), 0.08)], 0.0);
        let c = DiscreteDistribution::point_mass(r(0))
            .complement_count(5)
            .unwrap();
        assert_eq!(c, DiscreteDistribution::point_mass(r(5)));
        let b = poisson_binomial_dp(&[0.5; 3]).unwrap();
        assert_eq!(b.complement_count(3).unwrap(), b);
    }

    #[test]
    fn complement_rejects_support_beyond_bound() {
        let d = counts(&[(0, 0.5), (4, 0.5)]);
        assert!(matches!(
            d.complement_count(3),
            Err(Error::SupportOutOfRange { bound: 3, .. })
        ));
        let frac = DiscreteDistribution::point_mass(Rational::new(1, 2));
        assert!(frac.complement_count(3).is_err());
    }

    #[test]
    fn from_masses_validates() {
        assert_eq!(
            DiscreteDistribution::from_masses([(r(0), 0.5), (r(1), 0.4)]),
            Err(Error::NotNormalized(0.9))
        );
        assert!(matches!(
            DiscreteDistribution::from_masses([(r(0), 1.5), (r(1), -0.5)]),
            Err(Error::NegativeProbability { .. })
        ));
        assert_eq!(
            DiscreteDistribution::from_masses([]),
            Err(Error::EmptyDistribution)
        );
        let merged = DiscreteDistribution::from_masses([
            (Rational::new(1, 2), 0.25),
            (Rational::new(2, 4), 0.75),
        ])
        .unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.probability(Rational::new(1, 2)), 1.0);
    }

    #[test]
    fn total_variation_over_union() {
        let a = counts(&[(0, 0.5), (1, 0.5)]);
        let b = counts(&[(1, 0.5), (2, 0.5)]);
        assert!((a.total_variation(&b) - 0.5).abs() < 1e-15);
        assert_eq!(a.total_variation(&a), 0.0);
    }

    fn params_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![8 => 0.0..=1.0f64, 1 => Just(0.0), 1 => Just(1.0)],
            0..=max_len,
        )
    }

    proptest! {
        #[test]
        fn both_methods_match_enumeration(params in params_strategy(12)) {
            let oracle = brute_force_pmf(&params);
            for d in [poisson_binomial_dp(&params).unwrap(), poisson_binomial_cf(&params).unwrap()] {
                for (k, &p) in oracle.iter().enumerate() {
                    prop_assert!((d.count_probability(k as u64) - p).abs() <= 1e-12);
                }
                prop_assert!(d.max_value().unwrap() <= r(params.len() as i64));
            }
        }

        #[test]
        fn moments_follow_linearity(params in params_strategy(200)) {
            let d = poisson_binomial_dp(&params).unwrap();
            let mean: f64 = params.iter().sum();
            let var: f64 = params.iter().map(|p| p * (1.0 - p)).sum();
            prop_assert!((d.expectation() - mean).abs() <= 1e-9);
            prop_assert!((d.variance() - var).abs() <= 1e-9);
            prop_assert!((d.total_mass() - 1.0).abs() <= PROBABILITY_TOLERANCE);
            prop_assert!(d.iter().all(|(_, p)| p > 0.0));
        }

        #[test]
        fn methods_agree(params in params_strategy(300)) {
            let dp = poisson_binomial_dp(&params).unwrap();
            let cf = poisson_binomial_cf(&params).unwrap();
            for k in 0..=params.len() as u64 {
                prop_assert!((dp.count_probability(k) - cf.count_probability(k)).abs() <= 1e-9);
            }
            prop_assert!(cf.iter().all(|(_, p)| p >= 0.0));
            prop_assert!((cf.total_mass() - 1.0).abs() <= PROBABILITY_TOLERANCE);
        }

        #[test]
        fn complement_is_involution(params in params_strategy(40)) {
            let d = poisson_binomial_dp(&params).unwrap();
            let m = params.len() as u64;
            let back = d.complement_count(m).unwrap().complement_count(m).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
