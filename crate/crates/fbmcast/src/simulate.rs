//! Exact path simulation: fractional Brownian motion via the Cholesky
//! transform, the logistic chaotic map, and chaotic/stochastic mixtures.
//!
//! Reproducibility contract: all randomness comes from a `ChaCha12` stream
//! seeded with the 64-bit seed in the spec, and standard normals are drawn
//! by inverse-CDF from open-interval uniforms (never by rejection), so a
//! given spec always yields the same path, bit for bit. Experiments that
//! need many independent paths derive per-path seeds as `base + index`;
//! each path gets a freshly seeded stream.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::corr::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::model::{HurstExponent, IncrementSeries, Series, Volatility};

/// Hard cap on the simulation grid: the exact sampler is O(n^2) memory and
/// O(n^3) setup time, which stays comfortable up to this size.
pub const MAX_SIMULATION_SIZE: usize = 5000;

const ORBIT_TOL: f64 = 1e-12;

/// Parameters of one exact fBm simulation.
#[derive(Debug, Clone, Copy)]
pub struct SimulationSpec {
    /// Grid size: the path has `n` increments and `n + 1` values.
    pub n: usize,
    pub hurst: HurstExponent,
    pub sigma: Volatility,
    pub seed: u64,
}

/// Additive chaotic/stochastic mixture `x_k = u_k + a * v_k`, with both
/// component sequences normalized to unit mean-square energy.
#[derive(Debug, Clone, Copy)]
pub struct MixtureSpec {
    /// Stochastic share `a >= 0`.
    pub share: f64,
    /// Start value of the logistic component, in (0, 1).
    pub chaotic_start: f64,
    /// Spec of the fBm component (`v_k = sigma * B_H(k/n)`).
    pub stochastic: SimulationSpec,
}

/// A generated mixture along with its normalized components.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub series: Series,
    /// Energy-normalized logistic component `u_1..u_n`.
    pub chaotic: Vec<f64>,
    /// Energy-normalized fBm component `v_1..v_n`.
    pub stochastic: Vec<f64>,
}

/// Reusable exact fBm sampler: factorizes the increment correlation matrix
/// once and then draws any number of seeded paths in O(n^2) each.
#[derive(Debug)]
pub struct FbmSampler {
    corr: CorrelationMatrix,
    scale: f64,
}

impl FbmSampler {
    pub fn new(n: usize, hurst: HurstExponent, sigma: Volatility) -> Result<Self> {
        if n == 0 || n > MAX_SIMULATION_SIZE {
            return Err(Error::InvalidParameter {
                name: "n",
                value: n as f64,
                constraint: "grid size must be in 1..=5000 for exact simulation",
            });
        }
        let corr = CorrelationMatrix::increments(n, hurst)?;
        // Increments of sigma * B_H on the k/n grid have standard deviation
        // sigma / n^H.
        let scale = sigma.value() / (n as f64).powf(hurst.value());
        Ok(Self { corr, scale })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.corr.dim()
    }

    /// Path `x_0 = 0, x_1, ..., x_n` for the given seed.
    pub fn path(&self, seed: u64) -> Series {
        self.increments(seed).cumulative(0.0)
    }

    /// Just the increments `y_1..y_n` for the given seed.
    pub fn increments(&self, seed: u64) -> IncrementSeries {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let eps = standard_normals(&mut rng, self.n());
        IncrementSeries::new(self.increments_from_noise(&eps))
            .expect("simulated increments are finite")
    }

    pub(crate) fn increments_from_noise(&self, eps: &[f64]) -> Vec<f64> {
        let mut y = self.corr.factor_mul(eps);
        for v in &mut y {
            *v *= self.scale;
        }
        y
    }
}

/// Exact simulation of `x_k = sigma * B_H(k/n)`: increments are the Cholesky
/// factor of the scaled correlation matrix applied to seeded i.i.d. standard
/// normals, and the path is their cumulative sum from `x_0 = 0`.
pub fn generate_fbm(spec: &SimulationSpec) -> Result<Series> {
    Ok(FbmSampler::new(spec.n, spec.hurst, spec.sigma)?.path(spec.seed))
}

/// The logistic chaotic sequence `u_{k+1} = 4 u_k (1 - u_k)`.
///
/// Start values on the short degenerate orbits (0, 1/4, 1/2, 3/4, 1) are
/// rejected up front; a trajectory that still lands on a fixed point within
/// 1e-12 aborts with `DegenerateOrbit`.
pub fn generate_logistic(n: usize, start: f64) -> Result<Series> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            constraint: "logistic sequence needs at least 2 points",
        });
    }
    if !start.is_finite() || start <= 0.0 || start >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "logistic start",
            value: start,
            constraint: "must lie strictly inside (0, 1)",
        });
    }
    for bad in [0.25, 0.5, 0.75] {
        if (start - bad).abs() <= ORBIT_TOL {
            return Err(Error::InvalidParameter {
                name: "logistic start",
                value: start,
                constraint: "start values 1/4, 1/2, 3/4 collapse onto fixed points",
            });
        }
    }

    let mut values = Vec::with_capacity(n);
    let mut u = start;
    values.push(u);
    for step in 1..n {
        u = 4.0 * u * (1.0 - u);
        if u.abs() <= ORBIT_TOL || (u - 0.75).abs() <= ORBIT_TOL {
            return Err(Error::DegenerateOrbit { step, value: u });
        }
        values.push(u);
    }
    Series::new(values)
}

/// Builds the additive mixture `x_k = u_k + a * v_k` from an
/// energy-normalized logistic sequence and an energy-normalized fBm path.
pub fn generate_mixture(spec: &MixtureSpec) -> Result<Mixture> {
    if !spec.share.is_finite() || spec.share < 0.0 {
        return Err(Error::InvalidParameter {
            name: "share",
            value: spec.share,
            constraint: "the stochastic share must be finite and >= 0",
        });
    }
    let n = spec.stochastic.n;
    let chaotic_raw = generate_logistic(n, spec.chaotic_start)?;
    // fBm values v_1..v_n (the zero starting value carries no energy).
    let fbm = generate_fbm(&spec.stochastic)?;

    let chaotic = normalize_energy(chaotic_raw.values())?;
    let stochastic = normalize_energy(&fbm.values()[1..])?;

    let series: Vec<f64> = chaotic
        .iter()
        .zip(&stochastic)
        .map(|(u, v)| u + spec.share * v)
        .collect();
    Ok(Mixture {
        series: Series::new(series)?,
        chaotic,
        stochastic,
    })
}

/// Scales a sequence so that its mean square is exactly 1.
fn normalize_energy(values: &[f64]) -> Result<Vec<f64>> {
    let energy = values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64;
    if energy <= 0.0 {
        return Err(Error::DegenerateInput("cannot energy-normalize a zero sequence"));
    }
    let s = energy.sqrt();
    Ok(values.iter().map(|v| v / s).collect())
}

/// i.i.d. standard normals by inverse-CDF over open-interval uniforms.
///
/// The uniform uses the top 53 bits of the ChaCha output, shifted half a ulp
/// into (0, 1), so every draw consumes exactly one `u64` from the stream.
fn standard_normals(rng: &mut ChaCha12Rng, count: usize) -> Vec<f64> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    (0..count)
        .map(|_| {
            let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0);
            normal.inverse_cdf(u)
        })
        .collect()
}
