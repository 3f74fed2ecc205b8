//! ARIMA(p, d, 0): conditional least squares on the differenced series and
//! iterated, re-integrated forecasts.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::DatedSeries;
use crate::linalg::{self, SolveError};
use crate::preprocess::{difference, undifference};

#[derive(Debug, Error, PartialEq)]
pub enum ArimaError {
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("singular design matrix (column {column})")]
    SingularDesign { column: usize },
    #[error("horizon must be at least 1")]
    InvalidHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    /// Order used for the inflation workflow: 15 annual lags, one difference.
    pub const INFLATION: ArimaOrder = ArimaOrder { p: 15, d: 1, q: 0 };

    pub fn new(p: usize, d: usize, q: usize) -> Result<Self, ArimaError> {
        let order = Self { p, d, q };
        order.validate()?;
        Ok(order)
    }

    pub fn validate(&self) -> Result<(), ArimaError> {
        if self.q != 0 {
            return Err(ArimaError::InvalidOrder(format!(
                "moving-average terms are not supported (q = {})",
                self.q
            )));
        }
        if self.p == 0 {
            return Err(ArimaError::InvalidOrder("p must be at least 1".into()));
        }
        if self.d > 2 {
            return Err(ArimaError::InvalidOrder(format!("d must be at most 2 (got {})", self.d)));
        }
        Ok(())
    }

    /// Minimum series length for a determined regression: `2p + d + 1`.
    pub fn min_len(&self) -> usize {
        2 * self.p + self.d + 1
    }
}

impl std::fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)
    }
}

impl std::str::FromStr for ArimaOrder {
    type Err = ArimaError;

    /// Parses `"p,d,q"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [p, d, q] = parts.as_slice() else {
            return Err(ArimaError::InvalidOrder(format!("expected p,d,q but got {s:?}")));
        };
        let num = |t: &str| {
            t.parse::<usize>()
                .map_err(|_| ArimaError::InvalidOrder(format!("not a non-negative integer: {t:?}")))
        };
        Self::new(num(p)?, num(d)?, num(q)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArModel {
    pub order: ArimaOrder,
    pub intercept: f64,
    /// Lag-1 coefficient first.
    pub coefficients: Vec<f64>,
    pub in_sample_residual_variance: f64,
    /// Regression rows used in the fit.
    pub rows: usize,
}

impl ArModel {
    /// Notes worth surfacing to the user, e.g. a thin regression.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.rows < 3 * self.order.p {
            out.push(format!(
                "{} fitted on {} rows, fewer than 3p = {}; coefficients may be unstable",
                self.order,
                self.rows,
                3 * self.order.p
            ));
        }
        out
    }

    /// One-step prediction on the differenced scale from `lags` (most recent first).
    fn predict_next(&self, lags: impl Iterator<Item = f64>) -> f64 {
        self.coefficients
            .iter()
            .zip(lags)
            .fold(self.intercept, |acc, (phi, x)| acc + phi * x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult {
    pub values: Vec<f64>,
    pub horizon_dates: Vec<NaiveDate>,
}

impl ForecastResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Fits `x_t = c + sum_i phi_i x_{t-i}` by OLS over every differenced
/// observation with a full lag history.
pub fn fit(series: &DatedSeries, order: ArimaOrder) -> Result<ArModel, ArimaError> {
    order.validate()?;
    let values = series.values();
    if values.len() < order.min_len() {
        return Err(ArimaError::InsufficientData(format!(
            "{} needs at least {} observations, got {}",
            order,
            order.min_len(),
            values.len()
        )));
    }
    let x = difference(&values, order.d).map_err(|e| ArimaError::InsufficientData(e.to_string()))?;
    let p = order.p;
    let cols = p + 1;
    let rows = x.len() - p;
    let mut design = Vec::with_capacity(rows * cols);
    let mut targets = Vec::with_capacity(rows);
    for t in p..x.len() {
        design.push(1.0);
        design.extend((1..=p).map(|i| x[t - i]));
        targets.push(x[t]);
    }
    let beta = linalg::least_squares(&design, &targets, cols).map_err(|e| match e {
        SolveError::Singular { column, .. } => ArimaError::SingularDesign { column },
        SolveError::Dimension(m) => ArimaError::InsufficientData(m),
    })?;

    let sse: f64 = design
        .chunks_exact(cols)
        .zip(&targets)
        .map(|(row, y)| {
            let fitted: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (y - fitted).powi(2)
        })
        .sum();
    let dof = rows - p - 1;
    let variance = if dof == 0 { 0.0 } else { sse / dof as f64 };

    Ok(ArModel {
        order,
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        in_sample_residual_variance: variance,
        rows,
    })
}

/// Iterates the fitted recurrence `horizon` steps past the end of `series`
/// and integrates back to the original scale. Dates continue annually.
pub fn forecast(model: &ArModel, series: &DatedSeries, horizon: usize) -> Result<ForecastResult, ArimaError> {
    if horizon == 0 {
        return Err(ArimaError::InvalidHorizon);
    }
    let ArimaOrder { p, d, .. } = model.order;
    let values = series.values();
    if values.len() < p + d {
        return Err(ArimaError::InsufficientData(format!(
            "forecasting {} needs at least {} observations, got {}",
            model.order,
            p + d,
            values.len()
        )));
    }
    let mut history = difference(&values, d).map_err(|e| ArimaError::InsufficientData(e.to_string()))?;
    let known = history.len();
    for _ in 0..horizon {
        let next = model.predict_next(history.iter().rev().copied());
        history.push(next);
    }
    let diffs = &history[known..];
    let levels = undifference(&values[values.len() - d..], diffs, d)
        .map_err(|e| ArimaError::InsufficientData(e.to_string()))?;

    let last_year = series.last().0.year();
    let horizon_dates = (1..=horizon as i32)
        .map(|k| NaiveDate::from_ymd_opt(last_year + k, 1, 1).expect("year in range"))
        .collect();
    Ok(ForecastResult {
        values: levels,
        horizon_dates,
    })
}

/// `(dates, actual, predicted)` on the original scale.
pub type InSamplePredictions = (Vec<NaiveDate>, Vec<f64>, Vec<f64>);

/// In-sample one-step-ahead predictions on the original scale, for every
/// observation whose differenced lags are all observed.
///
/// Returns `(dates, actual, predicted)`. The level error equals the
/// differenced residual because the integration terms are observed.
pub fn one_step_in_sample(
    model: &ArModel,
    series: &DatedSeries,
) -> Result<InSamplePredictions, ArimaError> {
    let ArimaOrder { p, d, .. } = model.order;
    let values = series.values();
    if values.len() < p + d + 1 {
        return Err(ArimaError::InsufficientData(format!(
            "need more than {} observations for an in-sample prediction",
            p + d
        )));
    }
    let x = difference(&values, d).map_err(|e| ArimaError::InsufficientData(e.to_string()))?;
    let dates = series.dates();
    let mut out_dates = Vec::new();
    let mut actual = Vec::new();
    let mut predicted = Vec::new();
    for t in p..x.len() {
        let diff_hat = model.predict_next(x[..t].iter().rev().copied());
        // Level index in the original series is t + d; the level is the
        // d-th difference plus terms fixed by the preceding d originals.
        let level_t = values[t + d];
        let integration = level_t - x[t];
        out_dates.push(dates[t + d]);
        actual.push(level_t);
        predicted.push(integration + diff_hat);
    }
    Ok((out_dates, actual, predicted))
}
