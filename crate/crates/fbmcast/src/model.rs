//! Core domain types: model parameters and observed series.
//!
//! A path is observed on the uniform grid `t_k = k/n`; the model for the
//! underlying process is `sigma * B_H(t)` where `B_H` is fractional Brownian
//! motion with covariance `R(t, s) = (t^2H + s^2H - |t - s|^2H) / 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hurst exponent of fractional Brownian motion, strictly inside (0, 1).
///
/// `H > 0.5` gives persistent (positively correlated) increments, `H < 0.5`
/// antipersistent ones; `H = 0.5` is ordinary Brownian motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HurstExponent(f64);

impl HurstExponent {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter {
                name: "hurst",
                value,
                constraint: "must lie strictly inside (0, 1)",
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `2H`, the exponent that actually appears in the covariance formulas.
    #[inline]
    pub fn doubled(self) -> f64 {
        2.0 * self.0
    }
}

impl std::fmt::Display for HurstExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Scale parameter `sigma > 0` of the process `sigma * B_H(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Volatility(f64);

impl Volatility {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter {
                name: "sigma",
                value,
                constraint: "must be finite and > 0",
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Volatility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// An observed path `x_0, ..., x_n` on the uniform grid `k/n`.
///
/// Stores `n + 1` values; index `k` corresponds to time `k/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "series length",
                value: values.len() as f64,
                constraint: "a series needs at least 2 values",
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "series value",
                value: *bad,
                constraint: "all values must be finite",
            });
        }
        Ok(Self { values })
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 values
    }

    /// Grid size `n`: the number of increments, one less than the value count.
    #[inline]
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// First differences `y_k = x_k - x_{k-1}`, `k = 1..n`.
    pub fn increments(&self) -> IncrementSeries {
        IncrementSeries {
            values: self.values.windows(2).map(|w| w[1] - w[0]).collect(),
        }
    }
}

/// Increments `y_1, ..., y_n` of an observed path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementSeries {
    values: Vec<f64>,
}

impl IncrementSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter {
                name: "increment count",
                value: 0.0,
                constraint: "at least one increment is required",
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "increment value",
                value: *bad,
                constraint: "all values must be finite",
            });
        }
        Ok(Self { values })
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Rebuilds the path by cumulative summation from the starting value `x0`.
    pub fn cumulative(&self, x0: f64) -> Series {
        let mut values = Vec::with_capacity(self.values.len() + 1);
        let mut acc = x0;
        values.push(acc);
        for y in &self.values {
            acc += y;
            values.push(acc);
        }
        Series { values }
    }
}

/// Covariance of fractional Brownian motion:
/// `R(t, s) = (t^2H + s^2H - |t - s|^2H) / 2` for `t, s >= 0`.
pub fn fbm_covariance(t: f64, s: f64, hurst: HurstExponent) -> f64 {
    debug_assert!(t >= 0.0 && s >= 0.0, "time arguments must be nonnegative");
    let two_h = hurst.doubled();
    0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h))
}

/// Correlation between neighboring increments: `rho_1 = 2^(2H-1) - 1`.
///
/// Vanishes at `H = 0.5`, positive for persistent processes, negative for
/// antipersistent ones. Evaluated as `2^2H / 2 - 1` so that it agrees bit
/// for bit with the lag-1 entry of the increment correlation matrix.
pub fn neighbor_correlation(hurst: HurstExponent) -> f64 {
    0.5 * 2f64.powf(hurst.doubled()) - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hurst_rejects_out_of_range() {
        assert!(HurstExponent::new(0.0).is_err());
        assert!(HurstExponent::new(1.0).is_err());
        assert!(HurstExponent::new(-0.2).is_err());
        assert!(HurstExponent::new(f64::NAN).is_err());
        assert!(HurstExponent::new(0.5).is_ok());
    }

    #[test]
    fn volatility_is_strictly_positive() {
        assert!(Volatility::new(0.0).is_err());
        assert!(Volatility::new(-1.0).is_err());
        assert!(Volatility::new(2.5).is_ok());
    }

    #[test]
    fn covariance_at_equal_times_is_variance() {
        for h in [0.1, 0.5, 0.9] {
            let h = HurstExponent::new(h).unwrap();
            assert_relative_eq!(fbm_covariance(1.0, 1.0, h), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn covariance_vanishes_at_origin() {
        let h = HurstExponent::new(0.7).unwrap();
        assert_relative_eq!(fbm_covariance(0.0, 5.0, h), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn covariance_reduces_to_min_for_brownian_motion() {
        let h = HurstExponent::new(0.5).unwrap();
        assert_relative_eq!(fbm_covariance(2.0, 1.0, h), 1.0, epsilon = 1e-14);
        assert_relative_eq!(fbm_covariance(0.25, 3.0, h), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn neighbor_correlation_matches_closed_form() {
        let z = HurstExponent::new(0.5).unwrap();
        assert_relative_eq!(neighbor_correlation(z), 0.0, epsilon = 1e-15);

        let p = HurstExponent::new(0.7).unwrap();
        assert_relative_eq!(
            neighbor_correlation(p),
            2f64.powf(0.4) - 1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(neighbor_correlation(p), 0.3195, epsilon = 1e-4);

        let a = HurstExponent::new(0.1).unwrap();
        assert_relative_eq!(
            neighbor_correlation(a),
            2f64.powf(-0.8) - 1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(neighbor_correlation(a), -0.4257, epsilon = 1e-4);
    }

    #[test]
    fn series_requires_two_finite_values() {
        assert!(Series::new(vec![1.0]).is_err());
        assert!(Series::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Series::new(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn increments_round_trip() {
        let x = Series::new(vec![0.5, 1.25, -0.75, 3.0]).unwrap();
        let y = x.increments();
        assert_eq!(y.len(), 3);
        let back = y.cumulative(0.5);
        for (a, b) in back.values().iter().zip(x.values()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }
}
