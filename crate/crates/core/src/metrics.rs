//! Regression error metrics: MAE, MSE, RMSE and R².

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {actual} actual vs {predicted} predicted")]
    LengthMismatch { actual: usize, predicted: usize },
    #[error("no samples")]
    Empty,
    #[error("actual values are constant; R² is undefined")]
    ConstantActual,
    #[error("non-finite value in input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub r2: f64,
    pub n: usize,
}

/// Reference values reported for the AAPL test split (dollars).
pub const REFERENCE_AAPL: MetricsReport = MetricsReport {
    mae: 4.33,
    mse: 30.40,
    rmse: 5.51,
    r2: 0.98,
    n: 0,
};

/// Reference values reported for the GOOGL test split (dollars).
pub const REFERENCE_GOOGL: MetricsReport = MetricsReport {
    mae: 4.33,
    mse: 31.26,
    rmse: 5.59,
    r2: 0.96,
    n: 0,
};

pub fn evaluate(actual: &[f64], predicted: &[f64]) -> Result<MetricsReport, MetricsError> {
    if actual.len() != predicted.len() {
        return Err(MetricsError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(MetricsError::Empty);
    }
    if actual.iter().chain(predicted).any(|v| !v.is_finite()) {
        return Err(MetricsError::NonFinite);
    }
    let n = actual.len() as f64;
    let mut abs_sum = 0.0;
    let mut ss_res = 0.0;
    for (a, p) in actual.iter().zip(predicted) {
        let e = a - p;
        abs_sum += e.abs();
        ss_res += e * e;
    }
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(MetricsError::ConstantActual);
    }
    let mse = ss_res / n;
    Ok(MetricsReport {
        mae: abs_sum / n,
        mse,
        rmse: mse.sqrt(),
        r2: 1.0 - ss_res / ss_tot,
        n: actual.len(),
    })
}
