//! Optimal conditional-mean extrapolation of Gaussian vectors, specialized
//! to fBm values and increments.
//!
//! For a zero-mean Gaussian vector with covariance `S` split into an
//! observed block `A` (size `m`), a future block `D` (size `r`) and the
//! cross block `C`, the mean-square-optimal forecast of the future
//! coordinates is the linear expression `C A^-1 xi`, and the mean-square
//! error of the forecast of step `j` is `D_jj - (A^-1 B_j, B_j)`.
//!
//! The whole-matrix Cholesky factor is computed once; the `A`-block solves
//! fall out of its leading principal block.

use serde::Serialize;

use crate::corr::{ConditioningWarning, CorrelationMatrix};
use crate::error::{Error, Result};
use crate::model::{HurstExponent, IncrementSeries, Series};

/// Forecast of `r` future coordinates with mean-square error bounds.
#[derive(Debug, Clone, Serialize)]
pub struct ForecastResult {
    pub predictions: Vec<f64>,
    /// Mean-square error `D_jj - (A^-1 B_j, B_j)` per forecast step, in the
    /// covariance units of the matrix used.
    pub per_step_mse: Vec<f64>,
    /// Error of the first step (the `r = 1` sub-problem).
    pub one_step_mse: f64,
    pub learning_size: usize,
    pub horizon: usize,
    pub warning: Option<ConditioningWarning>,
    /// Set when a mean-square error came out slightly negative from
    /// rounding and was clamped to zero.
    pub mse_clamped: bool,
}

/// Conditional-mean forecast of the trailing `horizon` coordinates of a
/// Gaussian vector with covariance `s`, given the leading `observed` ones.
pub fn conditional_forecast(
    observed: &[f64],
    s: &CorrelationMatrix,
    horizon: usize,
) -> Result<ForecastResult> {
    if horizon == 0 || horizon >= s.dim() {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: horizon as f64,
            constraint: "must be >= 1 and leave at least 2 observed coordinates",
        });
    }
    let m = s.dim() - horizon;
    if m < 2 {
        return Err(Error::InvalidParameter {
            name: "learning size",
            value: m as f64,
            constraint: "at least 2 observed coordinates are required",
        });
    }
    if observed.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: observed.len(),
        });
    }

    let alpha = s.solve_leading(m, observed)?;

    let predictions: Vec<f64> = (0..horizon)
        .map(|j| (0..m).map(|k| s.entry0(m + j, k) * alpha[k]).sum())
        .collect();

    let mut mse_clamped = false;
    let mut per_step_mse = Vec::with_capacity(horizon);
    for j in 0..horizon {
        let b: Vec<f64> = (0..m).map(|k| s.entry0(k, m + j)).collect();
        let w = s.solve_leading(m, &b)?;
        let explained: f64 = b.iter().zip(&w).map(|(bi, wi)| bi * wi).sum();
        let mut mse = s.entry0(m + j, m + j) - explained;
        if mse < 0.0 {
            mse_clamped = true;
            mse = 0.0;
        }
        per_step_mse.push(mse);
    }

    // Residual of the observed-block solve, against the exact entries.
    let norm_obs = observed.iter().map(|v| v * v).sum::<f64>().sqrt();
    let relative_residual = if norm_obs > 0.0 {
        let mut res = 0.0;
        for i in 0..m {
            let mut row = 0.0;
            for (k, a) in alpha.iter().enumerate() {
                row += s.entry0(i, k) * a;
            }
            let d = row - observed[i];
            res += d * d;
        }
        res.sqrt() / norm_obs
    } else {
        0.0
    };

    let cond = s.leading_condition_estimate(m);
    let config = s.config();
    let warning = (cond > config.condition_threshold
        || relative_residual > config.residual_tol)
        .then(|| ConditioningWarning {
            condition_estimate: cond,
            relative_residual: Some(relative_residual),
            jitter_used: s.jitter_used(),
        });

    Ok(ForecastResult {
        one_step_mse: per_step_mse[0],
        predictions,
        per_step_mse,
        learning_size: m,
        horizon,
        warning,
        mse_clamped,
    })
}

/// Forecast of fBm values `x_{m+1}..x_{m+r}` from `x_1..x_m`, using the
/// value covariance on the integer grid.
///
/// Conditioning deteriorates quickly for large `H` and `m`; above
/// `H = 0.85` with `m > 500` a warning is always attached because the
/// results can carry substantial rounding error there.
pub fn forecast_fbm_values(
    x: &Series,
    hurst: HurstExponent,
    m: usize,
    r: usize,
) -> Result<ForecastResult> {
    if m < 2 || r == 0 || m + r > x.n() {
        return Err(Error::InvalidParameter {
            name: "m + r",
            value: (m + r) as f64,
            constraint: "needs m >= 2, r >= 1 and m + r <= grid size of the series",
        });
    }
    let s = CorrelationMatrix::values(m + r, hurst)?;
    let mut result = conditional_forecast(&x.values()[1..=m], &s, r)?;
    if hurst.value() > 0.85 && m > 500 && result.warning.is_none() {
        result.warning = Some(ConditioningWarning {
            condition_estimate: s.leading_condition_estimate(m),
            relative_residual: None,
            jitter_used: s.jitter_used(),
        });
    }
    Ok(result)
}

/// Forecast of fBm increments `y_{m+1}..y_{m+r}` from `y_1..y_m`, using the
/// stationary increment correlation matrix. The predictive power here is
/// weak by nature (relative errors near 1); value forecasts are the useful
/// mode for persistent processes.
pub fn forecast_fbm_increments(
    y: &IncrementSeries,
    hurst: HurstExponent,
    m: usize,
    r: usize,
) -> Result<ForecastResult> {
    if m < 2 || r == 0 || m + r > y.len() {
        return Err(Error::InvalidParameter {
            name: "m + r",
            value: (m + r) as f64,
            constraint: "needs m >= 2, r >= 1 and m + r <= number of increments",
        });
    }
    let s = CorrelationMatrix::increments(m + r, hurst)?;
    conditional_forecast(&y.values()[..m], &s, r)
}

/// `|predicted - actual| / |actual|`; undefined at `actual = 0`.
pub fn relative_error(predicted: f64, actual: f64) -> Result<f64> {
    if actual == 0.0 {
        return Err(Error::DegenerateInput(
            "relative error is undefined for a zero actual value",
        ));
    }
    Ok((predicted - actual).abs() / actual.abs())
}
