//! Financial forecasting toolkit.
//!
//! - [`ingest`]: World Bank indicator series and Yahoo-style OHLCV CSV.
//! - [`preprocess`]: min-max scaling, differencing, lookback windows, chronological splits.
//! - [`arima`]: ARIMA(p, d, 0) by conditional least squares with iterated forecasts.
//! - [`lstm`]: two-layer LSTM regressor with BPTT, dropout, Adam and a text model format.
//! - [`metrics`]: MAE, MSE, RMSE and R².
//! - [`plot`]: deterministic SVG line charts.
//! - [`agents`]: a sequential support/QA agent crew over a pluggable chat backend.

pub mod agents;
pub mod arima;
pub mod ingest;
pub mod linalg;
pub mod lstm;
pub mod metrics;
pub mod plot;
pub mod preprocess;
pub mod rng;
pub mod synthetic;
