//! `fincast inflation`: fit an AR model to annual inflation and forecast it.

use std::path::PathBuf;

use clap::Args;
use fincast_core::arima::{self, ArimaOrder};
use fincast_core::ingest::{self, DEFAULT_INDICATOR, DEFAULT_TIMEOUT, WORLDBANK_BASE_URL};
use fincast_core::{metrics, plot};
use serde::Serialize;
use serde_json::json;

use crate::failure::{CmdResult, Failure, EXIT_DATA};
use crate::run::{dated_csv, pretty_json, read_input, Run};
use crate::OutputArgs;

#[derive(Debug, Clone, Args, Serialize)]
pub struct InflationArgs {
    /// World Bank country code, e.g. IN or US
    #[arg(long, required_unless_present = "from_json")]
    pub country: Option<String>,
    /// World Bank indicator id
    #[arg(long, default_value = DEFAULT_INDICATOR)]
    pub indicator: String,
    /// Read a saved World Bank API response instead of fetching
    #[arg(long, value_name = "FILE")]
    pub from_json: Option<PathBuf>,
    /// Model order as p,d,q (q must be 0)
    #[arg(long, default_value = "15,1,0")]
    pub order: ArimaOrder,
    /// Years to forecast past the last observation
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
    #[arg(long, default_value = WORLDBANK_BASE_URL, hide = true)]
    pub api_base: String,
}

pub fn run(args: &InflationArgs, out: &OutputArgs) -> CmdResult<()> {
    if args.horizon == 0 {
        return Err(Failure::new(EXIT_DATA, "--horizon must be at least 1"));
    }
    args.order.validate()?;
    let mut run = Run::start(&out.out_dir, "inflation", out.tag.as_deref(), json!(args))?;

    let body = match &args.from_json {
        Some(path) => {
            let bytes = read_input(path)?;
            run.input(path, &bytes);
            bytes
        }
        None => {
            let country = args.country.as_deref().unwrap_or_default();
            let bytes = ingest::fetch_worldbank_series_from(&args.api_base, country, &args.indicator, DEFAULT_TIMEOUT)?;
            let saved = run.write("source.json", &bytes)?;
            run.input(&saved, &bytes);
            bytes
        }
    };
    let series = ingest::parse_worldbank_json(&body)?;

    let model = arima::fit(&series, args.order)?;
    for w in model.warnings() {
        run.warn(w);
    }
    let forecast = arima::forecast(&model, &series, args.horizon)?;
    let (_, actual, predicted) = arima::one_step_in_sample(&model, &series)?;
    let report = metrics::evaluate(&actual, &predicted)?;

    run.write("history.csv", dated_csv(series.points().iter().copied()).as_bytes())?;
    run.write(
        "forecast.csv",
        dated_csv(forecast.horizon_dates.iter().copied().zip(forecast.values.iter().copied())).as_bytes(),
    )?;
    if forecast.len() >= 2 {
        let title = match &args.country {
            Some(c) => format!("{} inflation: history and {} forecast", c.to_uppercase(), args.order),
            None => format!("Inflation: history and {} forecast", args.order),
        };
        let svg = plot::history_forecast_plot(&series, &forecast, &title)?;
        run.write("inflation.svg", svg.as_bytes())?;
    } else {
        run.warn("a one-year forecast cannot be drawn as a line; inflation.svg skipped");
    }
    run.write("metrics.json", pretty_json(&report).as_bytes())?;
    run.summary(json!({
        "observations": series.len(),
        "first_year": series.first().0.format("%Y").to_string(),
        "last_year": series.last().0.format("%Y").to_string(),
        "intercept": model.intercept,
        "coefficients": model.coefficients,
        "regression_rows": model.rows,
        "residual_variance": model.in_sample_residual_variance,
    }));

    println!(
        "{} fitted on {} years ({}..{})",
        args.order,
        series.len(),
        series.first().0.format("%Y"),
        series.last().0.format("%Y")
    );
    for (date, value) in forecast.horizon_dates.iter().zip(&forecast.values) {
        println!("{}: {value:.2}", date.format("%Y"));
    }
    println!("in-sample one-step: mae {:.4}  rmse {:.4}", report.mae, report.rmse);
    let dir = run.finish()?;
    println!("wrote {}", dir.display());
    Ok(())
}
