//! Implementations of the CLI subcommands. Each returns the run report;
//! printing and exit codes live in `cli::run`.

use std::fmt::Write as _;
use std::time::Instant;

use serde_json::json;

use super::{
    resolve_output, write_file, CheckArgs, CliError, EstimateArgs, ForecastArgs, ForecastMode,
    RunReport, SimulateArgs, TablesArgs,
};
use crate::adequacy::AdequacyConfig;
use crate::estimate::EstimatorConfig;
use crate::forecast::ForecastResult;
use crate::model::{HurstExponent, IncrementSeries, Volatility};
use crate::pipeline::PipelineConfig;
use crate::simulate::{generate_fbm, SimulationSpec};

/// Anything smaller than this fraction of the value scale counts as a zero
/// crossing; relative errors are replaced by absolute ones there.
const NEAR_ZERO_FRACTION: f64 = 1e-8;

pub fn simulate(args: &SimulateArgs) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let spec = SimulationSpec {
        n: args.n,
        hurst: HurstExponent::new(args.hurst)?,
        sigma: Volatility::new(args.sigma)?,
        seed: args.seed,
    };
    let path = generate_fbm(&spec)?;

    let output = resolve_output(&args.output);
    let mut csv = String::from("index,value\n");
    for (k, v) in path.values().iter().enumerate() {
        writeln!(csv, "{k},{v}").expect("string write");
    }
    write_file(&output, &csv)?;

    let report = RunReport::new(
        "simulate",
        json!({
            "n": args.n,
            "hurst": args.hurst,
            "sigma": args.sigma,
            "seed": args.seed,
            "output": output.display().to_string(),
        }),
        vec![args.seed],
        json!({
            "rows": path.len(),
            "terminal_value": path.values().last(),
            "csv": output.display().to_string(),
        }),
        Vec::new(),
        started,
    );
    let sidecar = output.with_extension(
        format!(
            "{}report.json",
            output
                .extension()
                .map(|e| format!("{}.", e.to_string_lossy()))
                .unwrap_or_default()
        ),
    );
    write_file(&sidecar, &report.to_json())?;
    Ok(report)
}

pub fn estimate(args: &EstimateArgs) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let dataset = super::load_dataset(&args.input)?;
    require_rows(&dataset, 50)?;
    let series = dataset.series()?;
    let config = EstimatorConfig::compat(args.compat_08);
    let est = crate::estimate::estimate_hurst_with(&series.increments(), args.grid_step, &config)?;

    if let Some(out) = &args.output {
        let out = resolve_output(out);
        let mut csv = String::from("hurst,q,abs_deviation\n");
        for (h, q) in &est.profile {
            writeln!(csv, "{h},{q},{}", (q - 1.0).abs()).expect("string write");
        }
        write_file(&out, &csv)?;
    }

    let warnings: Vec<String> = est
        .skipped
        .iter()
        .map(|(h, e)| format!("grid point H = {h} skipped: {e}"))
        .collect();
    Ok(RunReport::new(
        "estimate",
        json!({
            "input": args.input.display().to_string(),
            "grid_step": args.grid_step,
            "compat_08": args.compat_08,
        }),
        Vec::new(),
        json!({
            "rows": dataset.values.len(),
            "hurst": est.hurst.value(),
            "sigma": est.sigma.value(),
            "q_at_min": est.q_at_min,
            "profile": est.profile,
        }),
        warnings,
        started,
    ))
}

pub fn check(args: &CheckArgs) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let dataset = super::load_dataset(&args.input)?;
    let series = dataset.series()?;
    let y = series.increments();
    let estimator = EstimatorConfig::compat(args.compat_08);

    let (hurst, hurst_estimated) = match args.hurst {
        Some(h) => (HurstExponent::new(h)?, false),
        None => (
            crate::estimate::estimate_hurst_with(&y, args.grid_step, &estimator)?.hurst,
            true,
        ),
    };
    let config = AdequacyConfig {
        beta0: args.beta0,
        estimator,
    };
    let report = crate::adequacy::test_hypothesis_with(&y, hurst, args.alpha, &config)?;

    let mut warnings = Vec::new();
    if let Some(note) = &report.boundary_note {
        warnings.push(note.clone());
    }
    let run = RunReport::new(
        "check",
        json!({
            "input": args.input.display().to_string(),
            "hurst": args.hurst,
            "alpha": args.alpha,
            "beta0": args.beta0,
            "grid_step": args.grid_step,
            "compat_08": args.compat_08,
        }),
        Vec::new(),
        json!({
            "rows": dataset.values.len(),
            "hurst_estimated": hurst_estimated,
            "report": report,
        }),
        warnings,
        started,
    );
    if let Some(out) = &args.output {
        write_file(&resolve_output(out), &run.to_json())?;
    }
    Ok(run)
}

pub fn forecast(args: &ForecastArgs) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let dataset = super::load_dataset(&args.input)?;
    let series = dataset.series()?;
    let estimator = EstimatorConfig::compat(args.compat_08);
    let (m, r) = (args.learning_size, args.horizon);

    let mut warnings = Vec::new();
    let mut hurst_estimated = false;
    let mut resolve_hurst = |y: &IncrementSeries| -> Result<HurstExponent, CliError> {
        match args.hurst {
            Some(h) => Ok(HurstExponent::new(h)?),
            None => {
                hurst_estimated = true;
                Ok(crate::estimate::estimate_hurst_with(y, args.grid_step, &estimator)?.hurst)
            }
        }
    };

    let (result, actual_at, hurst_used): (ForecastResult, Box<dyn Fn(usize) -> f64>, f64) =
        match args.mode {
            ForecastMode::Values => {
                let hurst = resolve_hurst(&series.increments())?;
                let result = crate::forecast::forecast_fbm_values(&series, hurst, m, r)?;
                let values = series.values().to_vec();
                (result, Box::new(move |j| values[m + j + 1]), hurst.value())
            }
            ForecastMode::Increments => {
                let y = series.increments();
                let hurst = resolve_hurst(&y)?;
                let result = crate::forecast::forecast_fbm_increments(&y, hurst, m, r)?;
                let values = y.values().to_vec();
                (result, Box::new(move |j| values[m + j]), hurst.value())
            }
            ForecastMode::Pipeline => {
                let config = PipelineConfig {
                    window: Some(args.window_size),
                    grid_step: args.grid_step,
                    alpha: args.alpha,
                    adequacy: AdequacyConfig {
                        beta0: args.beta0,
                        estimator,
                    },
                    ..PipelineConfig::default()
                };
                let model = crate::pipeline::fit(&series, &config)?;
                if model.adequacy.decision == crate::adequacy::Decision::Reject {
                    warnings.push(
                        "the adequacy test rejects the fitted model; forecasts may be unreliable"
                            .to_string(),
                    );
                }
                let forecast = crate::pipeline::predict(&model, &series, m, r)?;
                let values = series.values().to_vec();
                let result = ForecastResult {
                    predictions: forecast.predictions.clone(),
                    warning: forecast.warning.clone(),
                    ..forecast.u_forecast
                };
                (result, Box::new(move |j| values[m + j + 1]), model.hurst.value())
            }
        };

    if let Some(w) = &result.warning {
        let text = w.to_string();
        eprintln!("WARNING: {text}");
        warnings.push(text);
    }

    let scale = series
        .values()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let steps: Vec<serde_json::Value> = result
        .predictions
        .iter()
        .enumerate()
        .map(|(j, &p)| {
            let actual = actual_at(j);
            let near_zero = actual.abs() < NEAR_ZERO_FRACTION * scale;
            json!({
                "step": j + 1,
                "predicted": p,
                "actual": actual,
                "relative_error": if near_zero { None } else { Some((p - actual).abs() / actual.abs()) },
                "absolute_error": (p - actual).abs(),
                "near_zero_actual": near_zero,
            })
        })
        .collect();

    if let Some(out) = &args.output {
        let out = resolve_output(out);
        let mut csv =
            String::from("step,predicted,actual,relative_error,absolute_error,near_zero\n");
        for s in &steps {
            writeln!(
                csv,
                "{},{},{},{},{},{}",
                s["step"],
                s["predicted"],
                s["actual"],
                s["relative_error"]
                    .as_f64()
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
                s["absolute_error"],
                s["near_zero_actual"],
            )
            .expect("string write");
        }
        write_file(&out, &csv)?;
    }

    Ok(RunReport::new(
        "forecast",
        json!({
            "input": args.input.display().to_string(),
            "hurst": args.hurst,
            "learning_size": m,
            "horizon": r,
            "mode": format!("{:?}", args.mode).to_lowercase(),
            "window_size": args.window_size,
            "grid_step": args.grid_step,
            "alpha": args.alpha,
            "beta0": args.beta0,
            "compat_08": args.compat_08,
        }),
        Vec::new(),
        json!({
            "rows": dataset.values.len(),
            "hurst_used": hurst_used,
            "hurst_estimated": hurst_estimated,
            "predictions": result.predictions,
            "per_step_mse": result.per_step_mse,
            "one_step_mse": result.one_step_mse,
            "one_step_rmse": result.one_step_mse.sqrt(),
            "steps": steps,
        }),
        warnings,
        started,
    ))
}

pub fn tables(args: &TablesArgs) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let dir = args
        .output
        .clone()
        .or_else(|| std::env::var(super::OUTPUT_DIR_ENV).ok().map(Into::into))
        .unwrap_or_else(|| ".".into());
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;

    let estimator = EstimatorConfig::compat(args.compat_08);
    let files = match args.table {
        1 => super::tables::table1(&dir, args.seeds, args.seed, &estimator)?,
        2 => super::tables::table2(&dir, args.seeds, args.seed)?,
        3 => super::tables::table3(&dir, args.seeds, args.seed, &estimator)?,
        other => {
            return Err(CliError::Lib(crate::error::Error::InvalidParameter {
                name: "table",
                value: other as f64,
                constraint: "only tables 1, 2 and 3 exist",
            }))
        }
    };

    Ok(RunReport::new(
        "tables",
        json!({
            "table": args.table,
            "seeds": args.seeds,
            "seed": args.seed,
            "output": dir.display().to_string(),
            "compat_08": args.compat_08,
        }),
        (args.seed..args.seed + args.seeds).collect(),
        json!({ "files": files }),
        Vec::new(),
        started,
    ))
}

fn require_rows(dataset: &super::Dataset, min: usize) -> Result<(), CliError> {
    if dataset.values.len() < min {
        return Err(CliError::Lib(crate::error::Error::InvalidParameter {
            name: "rows",
            value: dataset.values.len() as f64,
            constraint: "input has too few rows for this command (need >= 50)",
        }));
    }
    Ok(())
}
