//! Toolkit for time series driven by fractional Brownian motion.
//!
//! What it does:
//!
//! * [`simulate`] — exact (Cholesky-based) fBm paths, the logistic chaotic
//!   sequence, and energy-normalized chaotic/stochastic mixtures, all
//!   bit-reproducible from a 64-bit seed;
//! * [`estimate`] — Hurst exponent and volatility estimation through the
//!   `Q(H)` statistic, plus absolute-moment utilities;
//! * [`forecast`] — optimal conditional-mean extrapolation of fBm values
//!   and increments with mean-square error bounds;
//! * [`adequacy`] — hypothesis test of the fBm model via the cubic control
//!   statistics `A_n`, `B_n`, `D_n`;
//! * [`pipeline`] — the full real-data chain: log + windowed detrend,
//!   power-transform Gaussianization, estimation, adequacy, forecast, and
//!   the inverse transforms back to original units;
//! * [`cli`] — a thin command-line front end over all of the above.
//!
//! The runnable `examples/` directory demonstrates each capability
//! end to end; start with `examples/simulate_fbm.rs`.

pub mod adequacy;
pub mod cli;
pub mod corr;
pub mod error;
pub mod estimate;
pub mod forecast;
pub mod model;
pub mod pipeline;
pub mod simulate;

pub use crate::corr::{ConditioningWarning, CorrelationKind, CorrelationMatrix, FactorConfig};
pub use crate::error::{Error, Result};
pub use crate::model::{
    fbm_covariance, neighbor_correlation, HurstExponent, IncrementSeries, Series, Volatility,
};
pub use crate::simulate::{generate_fbm, generate_logistic, generate_mixture, FbmSampler};
