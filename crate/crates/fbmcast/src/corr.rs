//! Correlation matrices of fractional Brownian motion and the SPD solve
//! kernel built on their cached Cholesky factorization.
//!
//! Two matrix families are supported, both parameterized by the Hurst
//! exponent `H` and indexed 1-based in the math layer (entry `(j, k)` with
//! `j, k = 1..n`; storage is 0-based internally):
//!
//! * increment kind: `s_jk = (|k-j+1|^2H + |k-j-1|^2H - 2|k-j|^2H) / 2`,
//!   the Toeplitz correlation matrix of stationary fBm increments
//!   (unit diagonal);
//! * value kind: `s_jk = (j^2H + k^2H - |k-j|^2H) / 2`, the covariance of
//!   fBm values on the integer grid (diagonal `j^2H`).
//!
//! Both are symmetric positive definite in exact arithmetic but become
//! numerically near-singular for large `H` and dimension, so factorization
//! retries with escalating diagonal jitter and every matrix carries a cheap
//! condition-number estimate taken from the factor's diagonal ratio.

use nalgebra::{Cholesky, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::HurstExponent;

/// Which correlation structure a matrix encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CorrelationKind {
    /// Stationary increment correlations (Toeplitz, unit diagonal).
    Increment,
    /// Covariance of the process values on the integer grid.
    Value,
}

/// Knobs for factorization and solve diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct FactorConfig {
    /// First jitter to try, as a multiple of the largest diagonal entry.
    pub jitter_start: f64,
    /// Largest jitter multiple to escalate to before giving up.
    pub jitter_max: f64,
    /// Multiplicative escalation step.
    pub jitter_factor: f64,
    /// Relative residual above which a solve attaches a warning.
    pub residual_tol: f64,
    /// Condition-estimate threshold above which a solve attaches a warning.
    pub condition_threshold: f64,
    /// Warn when `log10(det)` falls below this floor. Determinant collapse
    /// is the practical failure signal of these matrices at large `H` and
    /// dimension; their factor-diagonal condition estimate stays small even
    /// when the determinant underflows any representable scale.
    pub log10_det_floor: f64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        Self {
            jitter_start: 1e-12,
            jitter_max: 1e-6,
            jitter_factor: 10.0,
            residual_tol: 1e-8,
            condition_threshold: 1e12,
            log10_det_floor: -150.0,
        }
    }
}

/// Non-fatal diagnostic attached to solves against ill-conditioned matrices.
#[derive(Debug, Clone, Serialize)]
pub struct ConditioningWarning {
    pub condition_estimate: f64,
    pub log10_det: f64,
    pub relative_residual: Option<f64>,
    pub jitter_used: f64,
}

impl std::fmt::Display for ConditioningWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "correlation matrix is near-singular (log10 det {:.0}, condition estimate {:.3e}",
            self.log10_det, self.condition_estimate
        )?;
        if let Some(r) = self.relative_residual {
            write!(f, ", solve residual {:.3e}", r)?;
        }
        if self.jitter_used > 0.0 {
            write!(f, ", diagonal jitter {:.3e}", self.jitter_used)?;
        }
        write!(f, "); results may be inaccurate")
    }
}

/// Result of an SPD solve, with conditioning diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub values: Vec<f64>,
    pub relative_residual: f64,
    pub warning: Option<ConditioningWarning>,
}

/// A symmetric positive-definite correlation matrix with its cached
/// lower-triangular Cholesky factor.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    kind: CorrelationKind,
    hurst: HurstExponent,
    dim: usize,
    /// `pows[i] = i^2H`, the only table the entry formulas need.
    pows: Vec<f64>,
    /// Lower-triangular Cholesky factor of the (possibly jittered) matrix.
    factor: DMatrix<f64>,
    jitter_used: f64,
    condition_estimate: f64,
    log10_det: f64,
    config: FactorConfig,
}

impl CorrelationMatrix {
    /// Correlation matrix of `n` consecutive fBm increments.
    pub fn increments(n: usize, hurst: HurstExponent) -> Result<Self> {
        Self::with_config(CorrelationKind::Increment, n, hurst, FactorConfig::default())
    }

    /// Covariance matrix of fBm values at integer times `1..n`.
    pub fn values(n: usize, hurst: HurstExponent) -> Result<Self> {
        Self::with_config(CorrelationKind::Value, n, hurst, FactorConfig::default())
    }

    pub fn with_config(
        kind: CorrelationKind,
        n: usize,
        hurst: HurstExponent,
        config: FactorConfig,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "dimension",
                value: 0.0,
                constraint: "matrix dimension must be >= 1",
            });
        }
        let two_h = hurst.doubled();
        let pows: Vec<f64> = (0..=n).map(|i| (i as f64).powf(two_h)).collect();

        let max_diag = match kind {
            CorrelationKind::Increment => 1.0,
            CorrelationKind::Value => pows[n],
        };

        // Plain factorization first, then escalate diagonal jitter.
        let mut jitter = 0.0;
        let mut multiple = config.jitter_start;
        loop {
            if let Some(chol) = try_factorize(kind, n, &pows, jitter) {
                let factor = chol.unpack_dirty();
                let condition_estimate = condition_from_factor(&factor, n);
                let log10_det = log10_det_from_factor(&factor, n);
                return Ok(Self {
                    kind,
                    hurst,
                    dim: n,
                    pows,
                    factor,
                    jitter_used: jitter,
                    condition_estimate,
                    log10_det,
                    config,
                });
            }
            if multiple > config.jitter_max * (1.0 + 1e-9) {
                return Err(Error::Factorization {
                    dim: n,
                    hurst: hurst.value(),
                    max_jitter: jitter,
                });
            }
            jitter = multiple * max_diag;
            multiple *= config.jitter_factor;
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    #[inline]
    pub fn hurst(&self) -> HurstExponent {
        self.hurst
    }

    /// Diagonal jitter actually added before factorization succeeded
    /// (0 when the plain matrix factorized).
    #[inline]
    pub fn jitter_used(&self) -> f64 {
        self.jitter_used
    }

    /// Cheap condition-number estimate: squared ratio of the extreme
    /// diagonal entries of the Cholesky factor.
    #[inline]
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// Base-10 logarithm of the determinant, from the factor diagonal.
    #[inline]
    pub fn log10_det(&self) -> f64 {
        self.log10_det
    }

    /// Warning derived from the matrix diagnostics alone (condition
    /// estimate or determinant collapse), independent of any solve.
    pub fn conditioning_warning(&self) -> Option<ConditioningWarning> {
        (self.condition_estimate > self.config.condition_threshold
            || self.log10_det < self.config.log10_det_floor)
            .then(|| ConditioningWarning {
                condition_estimate: self.condition_estimate,
                log10_det: self.log10_det,
                relative_residual: None,
                jitter_used: self.jitter_used,
            })
    }

    /// Matrix entry in math (1-based) indexing: `j, k = 1..n`.
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        assert!(
            (1..=self.dim).contains(&j) && (1..=self.dim).contains(&k),
            "entry indices are 1-based and bounded by the dimension"
        );
        self.entry0(j - 1, k - 1)
    }

    /// Matrix entry in storage (0-based) indexing.
    #[inline]
    pub(crate) fn entry0(&self, i: usize, j: usize) -> f64 {
        entry_from_pows(self.kind, &self.pows, i, j)
    }

    /// Solves `S z = b` through the cached factor and reports the relative
    /// residual against the exact (unjittered) entry formula.
    pub fn solve(&self, b: &[f64]) -> Result<Solution> {
        if b.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: b.len(),
            });
        }
        let mut z = b.to_vec();
        self.forward_sub(self.dim, &mut z);
        self.backward_sub(self.dim, &mut z);

        let norm_b = norm2(b);
        let relative_residual = if norm_b > 0.0 {
            let mut res = 0.0;
            for i in 0..self.dim {
                let mut row = 0.0;
                for (j, zj) in z.iter().enumerate() {
                    row += self.entry0(i, j) * zj;
                }
                let d = row - b[i];
                res += d * d;
            }
            res.sqrt() / norm_b
        } else {
            0.0
        };

        let warning = (self.condition_estimate > self.config.condition_threshold
            || relative_residual > self.config.residual_tol)
            .then(|| ConditioningWarning {
                condition_estimate: self.condition_estimate,
                relative_residual: Some(relative_residual),
                jitter_used: self.jitter_used,
            });

        Ok(Solution {
            values: z,
            relative_residual,
            warning,
        })
    }

    /// Quadratic form `(S^-1 y, y)`, evaluated as the squared norm of the
    /// forward-substitution image `L^-1 y`, which keeps it nonnegative by
    /// construction.
    pub fn quadratic_form(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: y.len(),
            });
        }
        let mut w = y.to_vec();
        self.forward_sub(self.dim, &mut w);
        Ok(w.iter().map(|v| v * v).sum())
    }

    /// Multiplies the Cholesky factor into a noise vector (`L * eps`); this
    /// is the exact sampling transform for the distribution the matrix
    /// describes.
    pub(crate) fn factor_mul(&self, eps: &[f64]) -> Vec<f64> {
        debug_assert_eq!(eps.len(), self.dim);
        let l = &self.factor;
        (0..self.dim)
            .map(|i| (0..=i).map(|j| l[(i, j)] * eps[j]).sum())
            .collect()
    }

    /// Solves `A z = b` where `A` is the leading `m x m` principal block.
    ///
    /// The leading block of a Cholesky factor is the Cholesky factor of the
    /// leading block, so partitioned (forecast) solves reuse the cached
    /// factorization directly.
    pub(crate) fn solve_leading(&self, m: usize, b: &[f64]) -> Result<Vec<f64>> {
        if m > self.dim || b.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m.min(self.dim),
                actual: b.len(),
            });
        }
        let mut z = b.to_vec();
        self.forward_sub(m, &mut z);
        self.backward_sub(m, &mut z);
        Ok(z)
    }

    /// Condition estimate restricted to the leading `m x m` block.
    pub(crate) fn leading_condition_estimate(&self, m: usize) -> f64 {
        condition_from_factor(&self.factor, m)
    }

    pub(crate) fn config(&self) -> &FactorConfig {
        &self.config
    }

    /// In-place solve of `L[..m, ..m] w = b`.
    fn forward_sub(&self, m: usize, b: &mut [f64]) {
        let l = &self.factor;
        for i in 0..m {
            let mut acc = b[i];
            for j in 0..i {
                acc -= l[(i, j)] * b[j];
            }
            b[i] = acc / l[(i, i)];
        }
    }

    /// In-place solve of `L[..m, ..m]^T z = w`.
    fn backward_sub(&self, m: usize, b: &mut [f64]) {
        let l = &self.factor;
        for i in (0..m).rev() {
            let mut acc = b[i];
            for j in i + 1..m {
                acc -= l[(j, i)] * b[j];
            }
            b[i] = acc / l[(i, i)];
        }
    }
}

#[inline]
fn entry_from_pows(kind: CorrelationKind, pows: &[f64], i: usize, j: usize) -> f64 {
    match kind {
        CorrelationKind::Increment => {
            let lag = i.abs_diff(j);
            if lag == 0 {
                1.0
            } else {
                0.5 * (pows[lag + 1] + pows[lag - 1] - 2.0 * pows[lag])
            }
        }
        CorrelationKind::Value => {
            0.5 * (pows[i + 1] + pows[j + 1] - pows[i.abs_diff(j)])
        }
    }
}

fn try_factorize(
    kind: CorrelationKind,
    n: usize,
    pows: &[f64],
    jitter: f64,
) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = entry_from_pows(kind, pows, i, j);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m[(i, i)] += jitter;
    }
    Cholesky::new(m)
}

fn condition_from_factor(factor: &DMatrix<f64>, m: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..m {
        let d = factor[(i, i)];
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if lo > 0.0 {
        (hi / lo).powi(2)
    } else {
        f64::INFINITY
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
