//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p fincast --test acceptance`.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use chrono::NaiveDate;
use fincast_core::agents::templates::{default_crew, QA_ROLE, SUPPORT_ROLE};
use fincast_core::agents::{run_crew, ScriptedBackend};
use fincast_core::arima::{self, ArimaOrder};
use fincast_core::ingest::{self, DatedSeries};
use fincast_core::lstm::{
    self, batch_loss, init_network, loss_and_gradients, LstmNetwork, NetworkShape, TrainConfig, DEFAULT_DROPOUT,
    DEFAULT_LOOKBACK,
};
use fincast_core::metrics::{self, REFERENCE_AAPL, REFERENCE_GOOGL};
use fincast_core::plot::{render_line_chart, LineStyle, PlotSeries, PlotSpec};
use fincast_core::preprocess::{chrono_split, fit_scaler, make_windows, ScalerParams};
use fincast_core::rng::{self, Prng};
use fincast_core::synthetic::SineTrend;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn annual(values: &[f64]) -> DatedSeries {
    DatedSeries::new(
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| (NaiveDate::from_ymd_opt(1500 + i as i32, 1, 1).unwrap(), v))
            .collect(),
    )
    .unwrap()
}

fn gaussian(rng: &mut Prng) -> f64 {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    let u1 = 1.0 - rng::unit_f64(rng);
    let u2 = rng::unit_f64(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn c01_parameter_counts() -> Outcome {
    // 4 gates, each with input weights, recurrent weights and a bias.
    let lstm_params = |input: usize, hidden: usize| 4 * hidden * (input + hidden + 1);
    let expected = (lstm_params(1, 50), lstm_params(50, 50), 50 + 1);
    ensure!(expected == (10_400, 20_200, 51), "oracle disagrees with the reference layer summary: {expected:?}");
    let net = init_network(42, NetworkShape::default(), DEFAULT_DROPOUT).map_err(|e| e.to_string())?;
    let c = net.param_counts();
    ensure!(
        (c.layer1, c.layer2, c.dense, c.total) == (10_400, 20_200, 51, 30_651),
        "got {} / {} / {} total {}",
        c.layer1,
        c.layer2,
        c.dense,
        c.total
    );
    let stored: usize = net.param_slices().iter().map(|s| s.len()).sum();
    ensure!(stored == 30_651, "stored parameter buffers hold {stored} values");
    Ok("10,400 / 20,200 / 51, total 30,651".into())
}

fn c02_gradient_check() -> Outcome {
    const NETS: u64 = 24;
    const EPS: f64 = 1e-5;
    let mut worst = 0.0f64;
    for case in 0..NETS {
        let hidden = 1 + (case % 4) as usize;
        let lookback = 1 + (case % 5) as usize;
        let dropout = if case % 2 == 0 { 0.0 } else { 0.25 };
        let shape = NetworkShape {
            input_dim: 1,
            hidden,
            lookback,
        };
        let mut net = init_network(1000 + case, shape, dropout).map_err(|e| e.to_string())?;
        let mut r = rng::seeded(5000 + case);
        for buf in net.param_slices_mut() {
            for p in buf.iter_mut() {
                *p += rng::symmetric(&mut r, 0.3);
            }
        }
        let batch_len = 1 + (case % 3) as usize;
        let windows: Vec<Vec<f64>> = (0..batch_len)
            .map(|_| (0..lookback).map(|_| rng::unit_f64(&mut r)).collect())
            .collect();
        let targets: Vec<f64> = (0..batch_len).map(|_| rng::unit_f64(&mut r)).collect();
        let batch: Vec<(&[f64], f64)> = windows.iter().map(Vec::as_slice).zip(targets.iter().copied()).collect();

        // Re-seeding before every evaluation replays the same dropout masks.
        let mask_seed = 9000 + case;
        let masks = || (dropout > 0.0).then(|| rng::seeded(mask_seed));
        let (_, grads) = loss_and_gradients(&net, &batch, masks().as_mut()).map_err(|e| e.to_string())?;
        let analytic: Vec<Vec<f64>> = grads.slices().iter().map(|s| s.to_vec()).collect();

        let buffers = analytic.len();
        for b in 0..buffers {
            for k in 0..analytic[b].len() {
                let original = net.param_slices()[b][k];
                net.param_slices_mut()[b][k] = original + EPS;
                let plus = batch_loss(&net, &batch, masks().as_mut()).map_err(|e| e.to_string())?;
                net.param_slices_mut()[b][k] = original - EPS;
                let minus = batch_loss(&net, &batch, masks().as_mut()).map_err(|e| e.to_string())?;
                net.param_slices_mut()[b][k] = original;
                let numeric = (plus - minus) / (2.0 * EPS);
                let a = analytic[b][k];
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-7);
                worst = worst.max(rel);
            }
        }
    }
    ensure!(worst < 1e-4, "max relative error {worst:.3e} over {NETS} nets");
    Ok(format!("{NETS} nets, max relative error {worst:.2e} (< 1e-4)"))
}

fn c03_ar_recovery() -> Outcome {
    let check = |label: &str, got: f64, want: f64, tol: f64| -> Result<f64, String> {
        let err = (got - want).abs();
        ensure!(err <= tol, "{label}: got {got}, expected {want} (tol {tol})");
        Ok(err)
    };
    let mut worst_exact = 0.0f64;

    // Noiseless AR(1): x_t = 0.5 + 0.9 x_{t-1}.
    let mut x = vec![10.0];
    for _ in 1..60 {
        x.push(0.5 + 0.9 * x[x.len() - 1]);
    }
    let m = arima::fit(&annual(&x), ArimaOrder::new(1, 0, 0).unwrap()).map_err(|e| e.to_string())?;
    worst_exact = worst_exact.max(check("AR(1) intercept", m.intercept, 0.5, 1e-6)?);
    worst_exact = worst_exact.max(check("AR(1) phi", m.coefficients[0], 0.9, 1e-6)?);

    // Noiseless AR(2) with complex roots of modulus ~0.95.
    let mut x = vec![3.0, -1.0];
    for t in 2..80 {
        x.push(1.0 + 1.6 * x[t - 1] - 0.9 * x[t - 2]);
    }
    let m = arima::fit(&annual(&x), ArimaOrder::new(2, 0, 0).unwrap()).map_err(|e| e.to_string())?;
    worst_exact = worst_exact.max(check("AR(2) intercept", m.intercept, 1.0, 1e-6)?);
    worst_exact = worst_exact.max(check("AR(2) phi1", m.coefficients[0], 1.6, 1e-6)?);
    worst_exact = worst_exact.max(check("AR(2) phi2", m.coefficients[1], -0.9, 1e-6)?);

    // Noisy AR(2), sigma 0.1, n = 500.
    let mut r = rng::seeded(2024);
    let mut x = vec![1.25, 1.25];
    for t in 2..500 {
        x.push(1.0 + 0.5 * x[t - 1] - 0.3 * x[t - 2] + 0.1 * gaussian(&mut r));
    }
    let m = arima::fit(&annual(&x), ArimaOrder::new(2, 0, 0).unwrap()).map_err(|e| e.to_string())?;
    let mut worst_noisy = 0.0f64;
    worst_noisy = worst_noisy.max(check("noisy intercept", m.intercept, 1.0, 0.05)?);
    worst_noisy = worst_noisy.max(check("noisy phi1", m.coefficients[0], 0.5, 0.05)?);
    worst_noisy = worst_noisy.max(check("noisy phi2", m.coefficients[1], -0.3, 0.05)?);
    Ok(format!(
        "noiseless max error {worst_exact:.1e} (<= 1e-6), noisy max error {worst_noisy:.3} (<= 0.05)"
    ))
}

/// Least squares by modified Gram-Schmidt QR, written independently of the
/// library's normal-equation solver.
fn qr_least_squares(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = rows.len();
    let k = rows[0].len();
    let mut q: Vec<Vec<f64>> = (0..k).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut rmat = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let dot: f64 = (0..n).map(|t| q[i][t] * q[j][t]).sum();
            rmat[i][j] = dot;
            for t in 0..n {
                q[j][t] -= dot * q[i][t];
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        rmat[j][j] = norm;
        for v in q[j].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<f64> = (0..k).map(|j| (0..n).map(|t| q[j][t] * y[t]).sum()).collect();
    let mut beta = vec![0.0; k];
    for j in (0..k).rev() {
        let tail: f64 = (j + 1..k).map(|i| rmat[j][i] * beta[i]).sum();
        beta[j] = (qty[j] - tail) / rmat[j][j];
    }
    beta
}

fn c04_arima_pipeline_oracle() -> Outcome {
    const P: usize = 3;
    const HORIZON: usize = 10;
    let levels: Vec<f64> = (0..80)
        .map(|t| {
            let t = t as f64;
            5.0 + 0.3 * t + 2.0 * (0.7 * t).sin() + 0.5 * (1.9 * t).cos()
        })
        .collect();
    let series = annual(&levels);
    let model = arima::fit(&series, ArimaOrder::new(P, 1, 0).unwrap()).map_err(|e| e.to_string())?;
    let fc = arima::forecast(&model, &series, HORIZON).map_err(|e| e.to_string())?;

    let diffs: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let rows: Vec<Vec<f64>> = (P..diffs.len())
        .map(|t| {
            let mut row = vec![1.0];
            row.extend((1..=P).map(|lag| diffs[t - lag]));
            row
        })
        .collect();
    let beta = qr_least_squares(&rows, &diffs[P..]);

    let mut coef_err = (model.intercept - beta[0]).abs();
    for (a, b) in model.coefficients.iter().zip(&beta[1..]) {
        coef_err = coef_err.max((a - b).abs());
    }
    ensure!(coef_err < 1e-9, "coefficients differ from the QR oracle by {coef_err:e}");

    let mut y = levels.clone();
    let mut d = diffs.clone();
    let mut expected = Vec::new();
    for _ in 0..HORIZON {
        let n = d.len();
        let next_diff = beta[0] + (1..=P).map(|lag| beta[lag] * d[n - lag]).sum::<f64>();
        d.push(next_diff);
        let next = y[y.len() - 1] + next_diff;
        y.push(next);
        expected.push(next);
    }
    ensure!(fc.values.len() == HORIZON, "forecast has {} values", fc.values.len());
    let worst = fc
        .values
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    ensure!(worst <= 1e-9, "forecast differs from the recurrence oracle by {worst:e}");
    let last_year = NaiveDate::from_ymd_opt(1579, 1, 1).unwrap();
    ensure!(fc.horizon_dates[0] > last_year, "forecast dates do not continue the series");
    Ok(format!("ARIMA({P},1,0), 10 steps, max deviation {worst:.1e} (<= 1e-9)"))
}

fn c05_synthetic_benchmark() -> Outcome {
    ensure!(
        (REFERENCE_AAPL.r2, REFERENCE_GOOGL.r2) == (0.98, 0.96),
        "reference constants changed"
    );
    let start = Instant::now();
    let values = SineTrend::default().generate();
    ensure!(values.len() == 2_000, "synthetic series has {} points", values.len());
    let scaler = fit_scaler(&values).map_err(|e| e.to_string())?;
    let windows = make_windows(&scaler.transform_all(&values), DEFAULT_LOOKBACK).map_err(|e| e.to_string())?;
    let split = chrono_split(&windows, 0.8).map_err(|e| e.to_string())?;
    let mut net = init_network(42, NetworkShape::default(), DEFAULT_DROPOUT).map_err(|e| e.to_string())?;
    let report = lstm::train(&mut net, &split, &TrainConfig::default()).map_err(|e| e.to_string())?;
    let m = lstm::evaluate(&net, &split, &scaler).map_err(|e| e.to_string())?;
    let first = report.epoch_losses[0];
    let last = report.epoch_losses[report.epoch_losses.len() - 1];
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "test R² {:.4} (>= 0.90), loss epoch 1 {first:.5} -> epoch 10 {last:.5}, {secs:.0}s; \
         reference AAPL 0.98 / GOOGL 0.96 not reproducible without the original data snapshot",
        m.r2
    );
    ensure!(m.r2 >= 0.90, "{detail}");
    ensure!(last < first, "{detail}");
    ensure!(secs < 300.0, "{detail}");
    Ok(detail)
}

fn c06_metrics_oracle() -> Outcome {
    let m = metrics::evaluate(&[1.0, 2.0, 3.0], &[2.0, 2.0, 4.0]).map_err(|e| e.to_string())?;
    // Errors are (1, 0, 1): MAE = MSE = 2/3, SS_res = 2 = SS_tot.
    let expected = [2.0 / 3.0, 2.0 / 3.0, (2.0f64 / 3.0).sqrt(), 0.0];
    let got = [m.mae, m.mse, m.rmse, m.r2];
    for (g, e) in got.iter().zip(expected) {
        ensure!((g - e).abs() <= 1e-4, "got {got:?}, expected {expected:?}");
    }
    ensure!((0.6667 - m.mae).abs() <= 1e-4 && (0.8165 - m.rmse).abs() <= 1e-4, "rounded values differ");
    let p = metrics::evaluate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    ensure!(
        p.mae == 0.0 && p.mse == 0.0 && p.rmse == 0.0 && p.r2 == 1.0,
        "perfect prediction gave {p:?}"
    );
    Ok(format!("mae {:.4} mse {:.4} rmse {:.4} r2 {:.4}; perfect = (0,0,0,1)", m.mae, m.mse, m.rmse, m.r2))
}

fn c07_property_suite() -> Outcome {
    const CASES: usize = 500;
    let mut r = rng::seeded(77);
    let mut worst_roundtrip = 0.0f64;
    for _ in 0..CASES {
        let n = 2 + (rng::unit_f64(&mut r) * 200.0) as usize;
        let lo = rng::unit_f64(&mut r) * 1000.0;
        let span = 1.0 + rng::unit_f64(&mut r) * 1000.0;
        let values: Vec<f64> = (0..n).map(|_| lo + rng::unit_f64(&mut r) * span).collect();
        let Ok(scaler) = fit_scaler(&values) else {
            continue;
        };
        for &x in &values {
            let err = (scaler.inverse_transform(scaler.transform(x)) - x).abs() / x.abs().max(1.0);
            worst_roundtrip = worst_roundtrip.max(err);
        }
        let lookback = 1 + (rng::unit_f64(&mut r) * n as f64 * 0.8) as usize;
        if lookback >= n {
            continue;
        }
        let ds = make_windows(&values, lookback).map_err(|e| e.to_string())?;
        ensure!(ds.len() == n - lookback, "n={n} lookback={lookback}: {} windows", ds.len());
        if ds.len() < 2 {
            continue;
        }
        let ratio = 0.05 + rng::unit_f64(&mut r) * 0.9;
        let Ok(split) = chrono_split(&ds, ratio) else {
            continue;
        };
        let joined: Vec<&Vec<f64>> = split.train.inputs().iter().chain(split.test.inputs()).collect();
        let original: Vec<&Vec<f64>> = ds.inputs().iter().collect();
        ensure!(joined == original, "split reorders or drops windows (n={n}, ratio={ratio})");
        let targets: Vec<f64> = split.train.targets().iter().chain(split.test.targets()).copied().collect();
        ensure!(targets == ds.targets(), "split reorders targets");
    }
    ensure!(worst_roundtrip <= 1e-12, "round trip error {worst_roundtrip:e}");
    Ok(format!("{CASES} random cases, worst round trip {worst_roundtrip:.1e} (<= 1e-12)"))
}

fn c08_iterative_forecast_contract(bin: &Path, tmp: &Path) -> Outcome {
    let shape = NetworkShape {
        input_dim: 1,
        hidden: 4,
        lookback: DEFAULT_LOOKBACK,
    };
    let stub = LstmNetwork::constant(shape, 0.5).map_err(|e| e.to_string())?;
    let scaler = ScalerParams::new(0.0, 200.0).map_err(|e| e.to_string())?;
    let prices = lstm::future_forecast(&stub, &scaler, &vec![0.1; DEFAULT_LOOKBACK], 5).map_err(|e| e.to_string())?;
    ensure!(prices == vec![100.0; 5], "stub forecast {prices:?}");

    let model = tmp.join("stub.fincast");
    lstm::save_model(&stub, &scaler, &model).map_err(|e| e.to_string())?;
    let out = Command::new(bin)
        .arg("--out-dir")
        .arg(tmp.join("out"))
        .args(["stock", "predict", "--days", "5", "--model"])
        .arg(&model)
        .arg("--csv")
        .arg(fixture("aapl.csv"))
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "predict failed: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let lines: Vec<&str> = stdout.lines().collect();
    ensure!(lines.len() == 5, "expected 5 lines, got {lines:?}");
    for (k, line) in lines.iter().enumerate() {
        // Same shape as "Day 1: $229.47".
        let price = line.strip_prefix(&format!("Day {}: $", k + 1)).ok_or(format!("bad line {line:?}"))?;
        let (whole, cents) = price.split_once('.').ok_or(format!("bad price {price:?}"))?;
        ensure!(
            !whole.is_empty() && whole.bytes().all(|b| b.is_ascii_digit()) && cents.len() == 2
                && cents.bytes().all(|b| b.is_ascii_digit()),
            "bad price {price:?}"
        );
        ensure!(price == "100.00", "stub price {price}");
    }
    Ok("five identical 100.00 prices; lines match \"Day k: $ddd.dd\"".into())
}

fn c09_train_determinism(bin: &Path, tmp: &Path) -> Outcome {
    let mut artifacts = Vec::new();
    for tag in ["first", "second"] {
        let out = Command::new(bin)
            .arg("--out-dir")
            .arg(tmp)
            .args(["--tag", tag, "stock", "train", "--seed", "7", "--csv"])
            .arg(fixture("aapl.csv"))
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(out.status.success(), "train failed: {}", String::from_utf8_lossy(&out.stderr));
        let dir = tmp.join("stock-train").join(tag);
        let metrics = fs::read(dir.join("metrics.json")).map_err(|e| e.to_string())?;
        let model = fs::read(dir.join("model.fincast")).map_err(|e| e.to_string())?;
        artifacts.push((metrics, model));
    }
    ensure!(artifacts[0].0 == artifacts[1].0, "metrics.json differs between runs");
    ensure!(artifacts[0].1 == artifacts[1].1, "model file differs between runs");
    Ok(format!(
        "metrics.json ({} bytes) and model file ({} bytes) byte-identical",
        artifacts[0].0.len(),
        artifacts[0].1.len()
    ))
}

fn c10_crew_pipeline() -> Outcome {
    let inputs: BTreeMap<String, String> = [("question", "How do I add memory to my crew?"), ("person", "Andrew")]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let run = || {
        let (agents, tasks) = default_crew(false);
        let mut backend = ScriptedBackend::new(["DRAFT", "FINAL"]);
        run_crew(&agents, &tasks, &mut backend, &[], &inputs).map_err(|e| e.to_string())
    };
    let a = run()?;
    let b = run()?;
    ensure!(a.entries.len() == 2, "{} entries", a.entries.len());
    ensure!(
        a.entries[0].agent_role == SUPPORT_ROLE && a.entries[1].agent_role == QA_ROLE,
        "unexpected agent order"
    );
    let second_prompt: String = a.entries[1].prompt.iter().map(|m| m.content.as_str()).collect();
    ensure!(second_prompt.contains(&a.entries[0].reply), "second prompt lacks the first reply");
    ensure!(a.final_answer == "FINAL", "final answer {:?}", a.final_answer);
    ensure!(a == b && a.to_jsonl() == b.to_jsonl(), "runs differ");
    Ok("2 entries, draft embedded in QA prompt, final answer \"FINAL\", identical across runs".into())
}

fn c11_ingestion_fixtures() -> Outcome {
    let body = fs::read(fixture("worldbank_in.json")).map_err(|e| e.to_string())?;
    let series = ingest::parse_worldbank_json(&body).map_err(|e| e.to_string())?;
    let v = series.value_at(NaiveDate::from_ymd_opt(1974, 1, 1).unwrap());
    ensure!(v == Some(28.6), "India 1974 value {v:?}");
    let text = fs::read_to_string(fixture("aapl.csv")).map_err(|e| e.to_string())?;
    let rows = text.lines().skip(1).filter(|l| !l.trim().is_empty()).count();
    let bars = ingest::parse_yahoo_csv(&text).map_err(|e| e.to_string())?;
    ensure!(bars.len() == rows, "{} bars from {rows} rows", bars.len());
    Ok(format!("India 1974 = 28.6; {rows} CSV rows -> {} bars", bars.len()))
}

fn c12_svg_determinism() -> Outcome {
    let mut spec = PlotSpec::new("Determinism", "x", "y");
    spec.series.push(PlotSeries {
        name: "history".into(),
        points: vec![(0.0, 1.0), (1.0, 3.0), (2.0, 2.0)],
        color: "blue".into(),
        style: LineStyle::Solid,
    });
    spec.series.push(PlotSeries {
        name: "forecast".into(),
        points: vec![(2.0, 2.0), (3.0, 2.5), (4.0, 2.25)],
        color: "red".into(),
        style: LineStyle::Dashed,
    });
    spec.series.push(PlotSeries {
        name: "band".into(),
        points: vec![(0.0, 0.0), (4.0, 4.0)],
        color: "blue".into(),
        style: LineStyle::Dashed,
    });
    let a = render_line_chart(&spec).map_err(|e| e.to_string())?;
    let b = render_line_chart(&spec.clone()).map_err(|e| e.to_string())?;
    ensure!(a == b, "two renders differ");
    let polylines: Vec<&str> = a.split("<polyline").skip(1).map(|s| &s[..s.find('>').unwrap()]).collect();
    ensure!(polylines.len() == spec.series.len(), "{} polylines for {} series", polylines.len(), spec.series.len());
    for (line, series) in polylines.iter().zip(&spec.series) {
        let dashed = line.contains("stroke-dasharray=\"6,4\"");
        ensure!(dashed == (series.style == LineStyle::Dashed), "dash mismatch for {}", series.name);
    }
    Ok(format!("{} polylines for {} series, dashed ones carry \"6,4\", byte-identical", polylines.len(), spec.series.len()))
}

fn main() {
    let bin = PathBuf::from(env!("CARGO_BIN_EXE_fincast"));
    let scratch = std::env::temp_dir().join(format!("fincast-acceptance-{}", std::process::id()));
    fs::create_dir_all(&scratch).expect("scratch directory");

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("parameter counts", Box::new(c01_parameter_counts)),
        ("gradient check", Box::new(c02_gradient_check)),
        ("AR exact recovery", Box::new(c03_ar_recovery)),
        ("ARIMA pipeline oracle", Box::new(c04_arima_pipeline_oracle)),
        ("synthetic benchmark", Box::new(c05_synthetic_benchmark)),
        ("metrics oracle", Box::new(c06_metrics_oracle)),
        ("scaler/window/split properties", Box::new(c07_property_suite)),
        ("iterative forecast contract", {
            let (bin, dir) = (bin.clone(), scratch.join("c08"));
            Box::new(move || {
                fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                c08_iterative_forecast_contract(&bin, &dir)
            })
        }),
        ("train determinism", {
            let (bin, dir) = (bin.clone(), scratch.join("c09"));
            Box::new(move || c09_train_determinism(&bin, &dir))
        }),
        ("crew pipeline", Box::new(c10_crew_pipeline)),
        ("ingestion fixtures", Box::new(c11_ingestion_fixtures)),
        ("SVG determinism", Box::new(c12_svg_determinism)),
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    let _ = panic::take_hook();
    let _ = fs::remove_dir_all(&scratch);
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
