//! `fincast stock train` and `fincast stock predict`.

use std::path::{Path, PathBuf};

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use clap::{Args, Subcommand};
use fincast_core::ingest::{self, DatedSeries};
use fincast_core::lstm::{
    self, LstmError, NetworkShape, TrainConfig, DEFAULT_DROPOUT, DEFAULT_HIDDEN, DEFAULT_LOOKBACK, STREAM_DROPOUT,
    STREAM_INIT, STREAM_SHUFFLE,
};
use fincast_core::plot;
use fincast_core::preprocess::{self, chrono_split, fit_scaler, make_windows};
use serde::Serialize;
use serde_json::json;

use crate::failure::{CmdResult, Failure, EXIT_DATA, EXIT_INSUFFICIENT};
use crate::run::{dated_csv, pretty_json, read_input, Run};
use crate::OutputArgs;

#[derive(Debug, Subcommand)]
pub enum StockCommand {
    /// Train the two-layer LSTM on a daily close history and score the test split
    Train(TrainArgs),
    /// Forecast the next trading days from a saved model
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Daily OHLCV history in Yahoo Finance CSV layout
    #[arg(long, value_name = "FILE")]
    pub csv: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LOOKBACK)]
    pub lookback: usize,
    /// Fraction of windows used for training
    #[arg(long, default_value_t = 0.8)]
    pub split: f64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch: usize,
    #[arg(long, default_value_t = 0.001)]
    pub learning_rate: f64,
    /// Seeds weight init, dropout masks and shuffling
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_DROPOUT)]
    pub dropout: f64,
    #[arg(long, default_value_t = DEFAULT_HIDDEN)]
    pub hidden: usize,
    /// Fit the min-max scaler on the training span only
    #[arg(long)]
    pub fit_scaler_on_train: bool,
    /// Where to save the model (default: model.fincast in the run directory)
    #[arg(long, value_name = "FILE")]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// History whose last closes seed the forecast
    #[arg(long, value_name = "FILE")]
    pub csv: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub days: usize,
}

pub fn run(cmd: &StockCommand, out: &OutputArgs) -> CmdResult<()> {
    match cmd {
        StockCommand::Train(args) => train(args, out),
        StockCommand::Predict(args) => predict(args, out),
    }
}

fn load_closes(run: &mut Run, path: &Path) -> CmdResult<DatedSeries> {
    let bytes = read_input(path)?;
    run.input(path, &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::new(EXIT_DATA, format!("{} is not UTF-8 text", path.display())))?;
    let bars = ingest::parse_yahoo_csv(&text)?;
    Ok(ingest::close_series(&bars)?)
}

fn train(args: &TrainArgs, out: &OutputArgs) -> CmdResult<()> {
    if !(args.split > 0.0 && args.split < 1.0) {
        return Err(Failure::new(EXIT_DATA, format!("--split must be in (0, 1), got {}", args.split)));
    }
    let mut run = Run::start(&out.out_dir, "stock-train", out.tag.as_deref(), json!(args))?;
    run.seed("init", args.seed);
    run.seed("dropout", args.seed);
    run.seed("shuffle", args.seed);
    run.seed("init_stream", STREAM_INIT);
    run.seed("dropout_stream", STREAM_DROPOUT);
    run.seed("shuffle_stream", STREAM_SHUFFLE);

    let closes = load_closes(&mut run, &args.csv)?;
    let values = closes.values();
    if values.len() <= args.lookback {
        return Err(Failure::new(
            EXIT_INSUFFICIENT,
            format!(
                "{} closes cannot fill a {}-day lookback window plus a target",
                values.len(),
                args.lookback
            ),
        ));
    }
    let scaler = if args.fit_scaler_on_train {
        let train_windows = preprocess::train_len(values.len() - args.lookback, args.split);
        fit_scaler(&values[..train_windows + args.lookback])?
    } else {
        fit_scaler(&values)?
    };
    let windows = make_windows(&scaler.transform_all(&values), args.lookback)?;
    let split = chrono_split(&windows, args.split)?;

    let shape = NetworkShape {
        input_dim: 1,
        hidden: args.hidden,
        lookback: args.lookback,
    };
    let mut net = lstm::init_network(args.seed, shape, args.dropout)?;
    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch,
        learning_rate: args.learning_rate,
        shuffle_seed: args.seed,
        ..TrainConfig::default()
    };
    eprintln!(
        "training {} parameters on {} windows ({} held out)",
        net.param_count(),
        split.train.len(),
        split.test.len()
    );
    let report = lstm::train_with_progress(&mut net, &split, &config, |epoch, loss| {
        eprintln!("epoch {}/{}  loss {loss:.6}", epoch + 1, config.epochs);
    })?;
    if let (Some(first), Some(last)) = (report.epoch_losses.first(), report.epoch_losses.last()) {
        if report.epoch_losses.len() > 1 && last >= first {
            run.warn(format!("training loss did not decrease ({first:.6} -> {last:.6})"));
        }
    }

    let (actual, predicted) = lstm::test_predictions(&net, &split, &scaler)?;
    let metrics = fincast_core::metrics::evaluate(&actual, &predicted)?;

    let model_path = match &args.model_out {
        Some(p) => {
            lstm::save_model(&net, &scaler, p).map_err(|e| Failure::io("cannot write", p, io_of(e)))?;
            run.output(p);
            p.clone()
        }
        None => run.write("model.fincast", lstm::write_model(&net, &scaler).as_bytes())?,
    };
    run.write("metrics.json", pretty_json(&metrics).as_bytes())?;
    let svg = plot::actual_vs_predicted_plot(&actual, &predicted, "Test split: actual vs predicted close")?;
    run.write("actual_vs_predicted.svg", svg.as_bytes())?;
    let counts = net.param_counts();
    run.summary(json!({
        "closes": values.len(),
        "train_windows": split.train.len(),
        "test_windows": split.test.len(),
        "scaler": scaler,
        "param_counts": {
            "layer1": counts.layer1,
            "layer2": counts.layer2,
            "dense": counts.dense,
            "total": counts.total,
        },
        "epoch_losses": report.epoch_losses,
        "param_checksum": report.param_checksum,
        "train_seconds": report.wall_clock_seconds,
    }));

    println!(
        "test split: mae {:.4}  mse {:.4}  rmse {:.4}  r2 {:.4}  (n={})",
        metrics.mae, metrics.mse, metrics.rmse, metrics.r2, metrics.n
    );
    println!("model saved to {}", model_path.display());
    let dir = run.finish()?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn io_of(e: LstmError) -> std::io::Error {
    match e {
        LstmError::Io(io) => io,
        other => std::io::Error::other(other.to_string()),
    }
}

/// The `n` weekdays following `after`.
pub fn next_trading_days(after: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut day = after;
    while out.len() < n {
        day += Duration::days(1);
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day);
        }
    }
    out
}

fn predict(args: &PredictArgs, out: &OutputArgs) -> CmdResult<()> {
    let mut run = Run::start(&out.out_dir, "stock-predict", out.tag.as_deref(), json!(args))?;
    let model_bytes = read_input(&args.model)?;
    run.input(&args.model, &model_bytes);
    let text = String::from_utf8(model_bytes).map_err(|_| {
        Failure::from(LstmError::Format(format!("{} is not a text model file", args.model.display())))
    })?;
    let (net, scaler) = lstm::read_model(&text)?;

    let closes = load_closes(&mut run, &args.csv)?;
    let values = closes.values();
    if values.len() < net.lookback {
        return Err(Failure::new(
            EXIT_INSUFFICIENT,
            format!("model needs {} closes, the CSV has {}", net.lookback, values.len()),
        ));
    }
    let last_window = scaler.transform_all(&values[values.len() - net.lookback..]);
    let prices = lstm::future_forecast(&net, &scaler, &last_window, args.days)?;
    let dates = next_trading_days(closes.last().0, args.days);

    for (k, price) in prices.iter().enumerate() {
        println!("Day {}: ${price:.2}", k + 1);
    }
    run.write("forecast.csv", dated_csv(dates.into_iter().zip(prices.iter().copied())).as_bytes())?;
    run.summary(json!({
        "last_date": closes.last().0.to_string(),
        "last_close": closes.last().1,
        "lookback": net.lookback,
    }));
    let dir = run.finish()?;
    eprintln!("wrote {}", dir.display());
    Ok(())
}
