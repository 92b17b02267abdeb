//! Monte Carlo regeneration of the experiment tables: per-cell medians with
//! interquartile spreads, written as CSV matrices.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{write_file, CliError};
use crate::adequacy::{control_statistics, normalize_increments_with, thresholds};
use crate::corr::CorrelationMatrix;
use crate::estimate::{q_statistic_with_matrix, EstimatorConfig};
use crate::forecast::conditional_forecast;
use crate::model::{HurstExponent, Volatility};
use crate::simulate::FbmSampler;

fn h(v: f64) -> HurstExponent {
    HurstExponent::new(v).expect("table grid exponent")
}

fn unit_sigma() -> Volatility {
    Volatility::new(1.0).expect("unit volatility")
}

fn median(values: &mut Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

fn interquartile(values: &mut Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    values[(3 * n / 4).min(n - 1)] - values[n / 4]
}

/// Q statistics across the (generator H, trial H) grid.
pub fn table1(
    dir: &Path,
    seeds: u64,
    base_seed: u64,
    estimator: &EstimatorConfig,
) -> Result<Vec<String>, CliError> {
    let generator_h = [0.1, 0.3, 0.7, 0.9];
    let trial_h = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9];
    let mut files = Vec::new();

    for n in [200usize, 1000] {
        // One factorization per trial exponent, shared by every cell.
        let matrices: Vec<CorrelationMatrix> = trial_h
            .par_iter()
            .map(|&hj| CorrelationMatrix::increments(n, h(hj)))
            .collect::<Result<_, _>>()?;

        let mut medians = String::from(header(&trial_h));
        let mut spreads = String::from(header(&trial_h));
        for &hk in &generator_h {
            let sampler = FbmSampler::new(n, h(hk), unit_sigma())?;
            let per_seed: Vec<Vec<f64>> = (0..seeds)
                .into_par_iter()
                .map(|i| {
                    let y = sampler.increments(base_seed + i);
                    matrices
                        .iter()
                        .map(|s| {
                            q_statistic_with_matrix(&y, s, estimator)
                                .expect("simulated increments are nonzero")
                        })
                        .collect()
                })
                .collect();
            write_row(&mut medians, hk, &trial_h, &per_seed, median);
            write_row(&mut spreads, hk, &trial_h, &per_seed, interquartile);
        }
        files.push(emit(dir, &format!("table1_n{n}.csv"), &medians)?);
        files.push(emit(dir, &format!("table1_n{n}_spread.csv"), &spreads)?);
    }
    Ok(files)
}

fn header(trial_h: &[f64]) -> String {
    let cols: Vec<String> = trial_h.iter().map(|h| h.to_string()).collect();
    format!("h_k,{}\n", cols.join(","))
}

fn write_row(
    out: &mut String,
    hk: f64,
    trial_h: &[f64],
    per_seed: &[Vec<f64>],
    stat: fn(&mut Vec<f64>) -> f64,
) {
    let cells: Vec<String> = (0..trial_h.len())
        .map(|j| {
            let mut column: Vec<f64> = per_seed.iter().map(|row| row[j]).collect();
            format!("{:.4}", stat(&mut column))
        })
        .collect();
    writeln!(out, "{hk},{}", cells.join(",")).expect("string write");
}

/// Per-step relative errors of the 8-step value forecast.
pub fn table2(dir: &Path, seeds: u64, base_seed: u64) -> Result<Vec<String>, CliError> {
    const HORIZON: usize = 8;
    let mut csv = String::from("h,m,step1,step2,step3,step4,step5,step6,step7,step8\n");
    for &hv in &[0.3, 0.7, 0.9] {
        for &m in &[100usize, 500, 1000] {
            let n = m + HORIZON;
            let sampler = FbmSampler::new(n, h(hv), unit_sigma())?;
            let cov = CorrelationMatrix::values(n, h(hv))?;
            let per_seed: Vec<Vec<f64>> = (0..seeds)
                .into_par_iter()
                .map(|i| {
                    let x = sampler.path(base_seed + i);
                    let result = conditional_forecast(&x.values()[1..=m], &cov, HORIZON)
                        .expect("forecast of simulated path");
                    (0..HORIZON)
                        .map(|j| {
                            let actual = x.values()[m + j + 1];
                            (result.predictions[j] - actual).abs() / actual.abs()
                        })
                        .collect()
                })
                .collect();
            let cells: Vec<String> = (0..HORIZON)
                .map(|j| {
                    let mut column: Vec<f64> = per_seed.iter().map(|row| row[j]).collect();
                    format!("{:.4}", median(&mut column))
                })
                .collect();
            writeln!(csv, "{hv},{m},{}", cells.join(",")).expect("string write");
        }
    }
    Ok(vec![emit(dir, "table2.csv", &csv)?])
}

/// Control statistics of the adequacy test on true fBm.
pub fn table3(
    dir: &Path,
    seeds: u64,
    base_seed: u64,
    estimator: &EstimatorConfig,
) -> Result<Vec<String>, CliError> {
    let mut csv = String::from("h,n,a_n,b_n,d_n,beta1\n");
    for &hv in &[0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9] {
        for n in [200usize, 1000] {
            let sampler = FbmSampler::new(n, h(hv), unit_sigma())?;
            let stats: Vec<(f64, f64, f64)> = (0..seeds)
                .into_par_iter()
                .map(|i| {
                    let y = sampler.increments(base_seed + i);
                    let z = normalize_increments_with(&y, estimator)
                        .expect("simulated increments are nonzero");
                    let s = control_statistics(&z, h(hv));
                    (s.a_n, s.b_n, s.d_n)
                })
                .collect();
            let mut a: Vec<f64> = stats.iter().map(|s| s.0).collect();
            let mut b: Vec<f64> = stats.iter().map(|s| s.1).collect();
            let mut d: Vec<f64> = stats.iter().map(|s| s.2).collect();
            let beta1 = thresholds(h(hv), 0.1)?.beta1;
            if hv < 0.5 {
                writeln!(
                    csv,
                    "{hv},{n},{:.4},{:.4},,{:.4}",
                    median(&mut a),
                    median(&mut b),
                    beta1
                )
                .expect("string write");
            } else {
                writeln!(csv, "{hv},{n},,,{:.4},", median(&mut d)).expect("string write");
            }
        }
    }
    Ok(vec![emit(dir, "table3.csv", &csv)?])
}

fn emit(dir: &Path, name: &str, contents: &str) -> Result<String, CliError> {
    let path: PathBuf = dir.join(name);
    write_file(&path, contents)?;
    Ok(path.display().to_string())
}
