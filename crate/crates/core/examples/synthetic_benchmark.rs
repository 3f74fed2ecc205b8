//! Trains the default network on the seeded sine-plus-trend series and
//! prints per-epoch loss and test metrics.

use fincast_core::lstm::{self, NetworkShape, TrainConfig, DEFAULT_DROPOUT, DEFAULT_LOOKBACK};
use fincast_core::preprocess::{chrono_split, fit_scaler, make_windows};
use fincast_core::synthetic::SineTrend;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let values = SineTrend::default().generate();
    let scaler = fit_scaler(&values)?;
    let windows = make_windows(&scaler.transform_all(&values), DEFAULT_LOOKBACK)?;
    let split = chrono_split(&windows, 0.8)?;
    let mut net = lstm::init_network(42, NetworkShape::default(), DEFAULT_DROPOUT)?;
    let report = lstm::train_with_progress(&mut net, &split, &TrainConfig::default(), |epoch, loss| {
        println!("epoch {:>2}  loss {loss:.6}", epoch + 1);
    })?;
    let metrics = lstm::evaluate(&net, &split, &scaler)?;
    println!(
        "test mae {:.4}  rmse {:.4}  r2 {:.4}  ({:.1}s)",
        metrics.mae, metrics.rmse, metrics.r2, report.wall_clock_seconds
    );
    Ok(())
}
