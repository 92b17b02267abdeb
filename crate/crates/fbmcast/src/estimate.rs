//! Estimation of the Hurst exponent and volatility from increment data.
//!
//! The central object is the statistic
//! `Q(H) = (c / R_1n) * sqrt((S_H^-1 y, y) / n)` with `c = sqrt(2/pi)`,
//! the ratio of two volatility estimators that agree exactly when `H` is
//! the true exponent; the Hurst estimate is the grid minimizer of
//! `|Q(H) - 1|`. The same absolute-moment statistics also drive the
//! kurtosis ratio used by the transform pipeline.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::corr::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::model::{HurstExponent, IncrementSeries, Volatility};

/// The exact normalization constant `sqrt(2/pi)`, the mean absolute value
/// of a standard normal.
pub fn exact_q_constant() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt()
}

/// Options shared by the Q statistic and the increment normalization.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorConfig {
    /// Constant `c` in `Q(H)` and in `z_k = (c / R_1n) y_k`. Defaults to
    /// the exact `sqrt(2/pi)`; the rounded literal 0.8 is available for
    /// compatibility with tabulated results that used it.
    pub q_constant: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            q_constant: exact_q_constant(),
        }
    }
}

impl EstimatorConfig {
    /// Configuration using the rounded constant 0.8.
    pub fn rounded() -> Self {
        Self { q_constant: 0.8 }
    }

    pub fn compat(use_rounded: bool) -> Self {
        if use_rounded {
            Self::rounded()
        } else {
            Self::default()
        }
    }
}

/// First and second absolute-moment statistics of an increment series.
#[derive(Debug, Clone, Copy)]
pub struct MomentStatistics {
    /// `R_1n = (1/n) sum |y_k|`.
    pub r1: f64,
    /// `R_2n = (1/n) sum y_k^2`.
    pub r2: f64,
    pub n: usize,
}

impl MomentStatistics {
    pub fn from_increments(y: &IncrementSeries) -> Self {
        let n = y.len();
        let mut r1 = 0.0;
        let mut r2 = 0.0;
        for v in y.values() {
            r1 += v.abs();
            r2 += v * v;
        }
        Self {
            r1: r1 / n as f64,
            r2: r2 / n as f64,
            n,
        }
    }
}

/// `R_jn = (1/n) sum |y_k|^j`.
pub fn abs_moment(y: &IncrementSeries, j: u32) -> f64 {
    let n = y.len() as f64;
    y.values().iter().map(|v| v.abs().powi(j as i32)).sum::<f64>() / n
}

/// Expected value of `R_jn` for increments of `sigma * B_H` on the `k/n`
/// grid: `(sigma^j / n^(jH)) * 2^(j/2) Gamma((j+1)/2) / sqrt(pi)`.
pub fn expected_moment(n: usize, j: u32, hurst: HurstExponent, sigma: Volatility) -> f64 {
    let j = j as f64;
    let scale = sigma.value().powf(j) / (n as f64).powf(j * hurst.value());
    scale * 2f64.powf(j / 2.0) * gamma((j + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// Volatility estimator with known `H`: `sigma_hat = n^H sqrt(pi/2) R_1n`.
pub fn sigma_hat_1(r1: f64, n: usize, hurst: HurstExponent) -> Result<Volatility> {
    if !(r1 > 0.0) {
        return Err(Error::DegenerateInput(
            "sigma estimation needs a positive mean absolute increment",
        ));
    }
    Volatility::new((n as f64).powf(hurst.value()) * (std::f64::consts::PI / 2.0).sqrt() * r1)
}

/// Hurst estimator with known `sigma`:
/// `H_hat = ln(sqrt(2/pi) sigma / R_1n) / ln n`.
///
/// Returned raw; the value can leave (0, 1) on unlucky samples.
pub fn hurst_with_known_sigma(r1: f64, sigma: Volatility, n: usize) -> Result<f64> {
    if !(r1 > 0.0) {
        return Err(Error::DegenerateInput(
            "Hurst estimation needs a positive mean absolute increment",
        ));
    }
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            constraint: "needs at least 2 increments",
        });
    }
    Ok((exact_q_constant() * sigma.value() / r1).ln() / (n as f64).ln())
}

/// Quadratic-form volatility estimator:
/// `sigma_hat = sqrt(n^(2H-1) (S_H^-1 y, y))`.
pub fn sigma_hat_2(y: &IncrementSeries, hurst: HurstExponent) -> Result<Volatility> {
    let s = CorrelationMatrix::increments(y.len(), hurst)?;
    sigma_hat_2_with_matrix(y, &s)
}

/// Same estimator against a prebuilt correlation matrix (reused across
/// many series of the same length in Monte Carlo runs).
pub fn sigma_hat_2_with_matrix(y: &IncrementSeries, s: &CorrelationMatrix) -> Result<Volatility> {
    let n = y.len();
    let qf = s.quadratic_form(y.values())?;
    Volatility::new(((n as f64).powf(s.hurst().doubled() - 1.0) * qf).sqrt())
}

/// `Q(H) = (c / R_1n) sqrt((S_H^-1 y, y) / n)`.
pub fn q_statistic(y: &IncrementSeries, h_trial: HurstExponent) -> Result<f64> {
    q_statistic_with(y, h_trial, &EstimatorConfig::default())
}

pub fn q_statistic_with(
    y: &IncrementSeries,
    h_trial: HurstExponent,
    config: &EstimatorConfig,
) -> Result<f64> {
    let s = CorrelationMatrix::increments(y.len(), h_trial)?;
    q_statistic_with_matrix(y, &s, config)
}

/// `Q` against a prebuilt matrix; the matrix fixes the trial `H`.
pub fn q_statistic_with_matrix(
    y: &IncrementSeries,
    s: &CorrelationMatrix,
    config: &EstimatorConfig,
) -> Result<f64> {
    let stats = MomentStatistics::from_increments(y);
    if !(stats.r1 > 0.0) {
        return Err(Error::DegenerateInput("all increments are zero"));
    }
    let qf = s.quadratic_form(y.values())?;
    Ok(config.q_constant / stats.r1 * (qf / y.len() as f64).sqrt())
}

/// Result of the grid search for the Hurst exponent.
#[derive(Debug, Clone, Serialize)]
pub struct HurstEstimate {
    pub hurst: HurstExponent,
    pub sigma: Volatility,
    /// `Q` at the selected grid point.
    pub q_at_min: f64,
    pub grid_step: f64,
    /// The full `(H, Q(H))` profile over the evaluated grid.
    pub profile: Vec<(f64, f64)>,
    /// Grid points skipped because their matrix failed to factorize.
    pub skipped: Vec<(f64, String)>,
}

/// Estimates `H` as the grid minimizer of `|Q(H) - 1|`, then `sigma` by the
/// quadratic-form estimator at the chosen `H`. Ties break toward smaller `H`.
pub fn estimate_hurst(y: &IncrementSeries, grid_step: f64) -> Result<HurstEstimate> {
    estimate_hurst_with(y, grid_step, &EstimatorConfig::default())
}

pub fn estimate_hurst_with(
    y: &IncrementSeries,
    grid_step: f64,
    config: &EstimatorConfig,
) -> Result<HurstEstimate> {
    let mut out = estimate_hurst_batch(std::slice::from_ref(y), grid_step, config)?;
    Ok(out.pop().expect("batch of one"))
}

/// Batch variant for Monte Carlo studies: every series must have the same
/// length, so each grid matrix is factorized once and shared. Grid points
/// are evaluated in parallel and merged back in grid order.
pub fn estimate_hurst_batch(
    ys: &[IncrementSeries],
    grid_step: f64,
    config: &EstimatorConfig,
) -> Result<Vec<HurstEstimate>> {
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            value: grid_step,
            constraint: "must lie in (0, 0.1]",
        });
    }
    let n = ys[0].len();
    for y in ys {
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: y.len(),
            });
        }
    }
    for y in ys {
        let stats = MomentStatistics::from_increments(y);
        if !(stats.r1 > 0.0) {
            return Err(Error::DegenerateInput("all increments are zero"));
        }
    }

    let grid = hurst_grid(grid_step);
    if grid.is_empty() {
        return Err(Error::Estimation(format!(
            "grid step {grid_step} produces no points inside (0.01, 0.99)"
        )));
    }

    // One factorization per grid point, evaluated for every series.
    let columns: Vec<(f64, std::result::Result<Vec<f64>, String>)> = grid
        .par_iter()
        .map(|&hv| {
            let hurst = HurstExponent::new(hv).expect("grid point inside (0, 1)");
            match CorrelationMatrix::increments(n, hurst) {
                Ok(s) => {
                    let qs = ys
                        .iter()
                        .map(|y| {
                            q_statistic_with_matrix(y, &s, config)
                                .expect("R_1n checked above; matrix dimension matches")
                        })
                        .collect();
                    (hv, Ok(qs))
                }
                Err(e) => (hv, Err(e.to_string())),
            }
        })
        .collect();

    let skipped: Vec<(f64, String)> = columns
        .iter()
        .filter_map(|(hv, r)| r.as_ref().err().map(|e| (*hv, e.clone())))
        .collect();

    let mut estimates = Vec::with_capacity(ys.len());
    for (idx, y) in ys.iter().enumerate() {
        let profile: Vec<(f64, f64)> = columns
            .iter()
            .filter_map(|(hv, r)| r.as_ref().ok().map(|qs| (*hv, qs[idx])))
            .collect();
        if profile.is_empty() {
            return Err(Error::Estimation(
                "every grid point failed to factorize".into(),
            ));
        }
        let best = argmin_profile(&profile);
        let (h_best, q_best) = profile[best];
        let hurst = HurstExponent::new(h_best).expect("grid point inside (0, 1)");
        let sigma = sigma_hat_2(y, hurst)?;
        estimates.push(HurstEstimate {
            hurst,
            sigma,
            q_at_min: q_best,
            grid_step,
            profile,
            skipped: skipped.clone(),
        });
    }
    Ok(estimates)
}

/// Grid `{k * step} ∩ (0.01, 0.99)`, ascending.
fn hurst_grid(step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 1usize;
    loop {
        let hv = k as f64 * step;
        if hv >= 0.99 {
            break;
        }
        if hv > 0.01 {
            grid.push(hv);
        }
        k += 1;
    }
    grid
}

/// Index of the smallest `|q - 1|`; ties keep the earliest (smallest `H`).
fn argmin_profile(profile: &[(f64, f64)]) -> usize {
    let mut best = 0;
    let mut best_dev = f64::INFINITY;
    for (i, &(_, q)) in profile.iter().enumerate() {
        let dev = (q - 1.0).abs();
        if dev < best_dev {
            best_dev = dev;
            best = i;
        }
    }
    best
}

/// Kurtosis ratio `d(y) = R_1n^2 / R_2n`; equals `2/pi` for Gaussian data.
pub fn kurtosis_ratio(y: &IncrementSeries) -> Result<f64> {
    let stats = MomentStatistics::from_increments(y);
    if !(stats.r2 > 0.0) {
        return Err(Error::DegenerateInput("all increments are zero"));
    }
    Ok(stats.r1 * stats.r1 / stats.r2)
}
