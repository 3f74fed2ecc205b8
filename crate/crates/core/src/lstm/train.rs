use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{adam_step, forward, loss_and_gradients, AdamState, LstmError, LstmNetwork, Mode};
use super::{STREAM_DROPOUT, STREAM_SHUFFLE};
use crate::metrics::{self, MetricsReport};
use crate::preprocess::{ScalerParams, SplitDataset};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub shuffle_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            batch_size: 32,
            learning_rate: 0.001,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            shuffle_seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LstmError> {
        if self.batch_size == 0 {
            return Err(LstmError::InvalidConfig("batch size must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(LstmError::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean training MSE per epoch, in scaled units.
    pub epoch_losses: Vec<f64>,
    pub wall_clock_seconds: f64,
    pub param_checksum: String,
}

/// Anything that maps a window to a one-step prediction in scaled units.
pub trait SequenceRegressor {
    fn lookback(&self) -> usize;
    fn predict(&self, window: &[f64]) -> Result<f64, LstmError>;
}

impl SequenceRegressor for LstmNetwork {
    fn lookback(&self) -> usize {
        self.lookback
    }

    fn predict(&self, window: &[f64]) -> Result<f64, LstmError> {
        forward(self, window, Mode::Infer).map(|(y, _)| y)
    }
}

/// Minibatch Adam over the training partition.
///
/// Each epoch visits the training windows in a fresh permutation drawn from
/// `config.shuffle_seed`; dropout masks come from a stream derived from the
/// network seed. `on_epoch` sees `(epoch index, mean epoch loss)`.
pub fn train(net: &mut LstmNetwork, split: &SplitDataset, config: &TrainConfig) -> Result<TrainReport, LstmError> {
    train_with_progress(net, split, config, |_, _| {})
}

pub fn train_with_progress(
    net: &mut LstmNetwork,
    split: &SplitDataset,
    config: &TrainConfig,
    mut on_epoch: impl FnMut(usize, f64),
) -> Result<TrainReport, LstmError> {
    config.validate()?;
    net.validate()?;
    let data = &split.train;
    if data.is_empty() {
        return Err(LstmError::InsufficientData("training partition is empty".into()));
    }
    if data.lookback() != net.lookback || net.layer1.input_dim != 1 {
        return Err(LstmError::Shape(format!(
            "dataset lookback {} does not match network lookback {} (univariate input)",
            data.lookback(),
            net.lookback
        )));
    }
    let start = Instant::now();
    let mut adam = AdamState::for_network(net);
    let mut dropout_rng = rng::derived(net.seed, STREAM_DROPOUT);
    let mut shuffle_rng = rng::derived(config.shuffle_seed, STREAM_SHUFFLE);
    let inputs = data.inputs();
    let targets = data.targets();

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let order = rng::permutation(&mut shuffle_rng, data.len());
        let mut weighted = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(&[f64], f64)> = chunk.iter().map(|&i| (inputs[i].as_slice(), targets[i])).collect();
            let (loss, grads) = loss_and_gradients(net, &batch, Some(&mut dropout_rng))?;
            weighted += loss * batch.len() as f64;
            let grad_slices = grads.slices();
            adam_step(&mut adam, &mut net.param_slices_mut(), &grad_slices, config);
        }
        let mean = weighted / data.len() as f64;
        on_epoch(epoch, mean);
        epoch_losses.push(mean);
    }
    Ok(TrainReport {
        epoch_losses,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        param_checksum: net.param_checksum(),
    })
}

/// Scaled one-step predictions for each window.
pub fn predict_series<R: SequenceRegressor + ?Sized>(net: &R, windows: &[Vec<f64>]) -> Result<Vec<f64>, LstmError> {
    windows.iter().map(|w| net.predict(w)).collect()
}

/// Test-partition `(actual, predicted)` in price units.
pub fn test_predictions<R: SequenceRegressor + ?Sized>(
    net: &R,
    split: &SplitDataset,
    scaler: &ScalerParams,
) -> Result<(Vec<f64>, Vec<f64>), LstmError> {
    let predicted = predict_series(net, split.test.inputs())?;
    Ok((scaler.inverse_all(split.test.targets()), scaler.inverse_all(&predicted)))
}

/// MAE/MSE/RMSE/R² on the test partition, after inverse scaling.
pub fn evaluate<R: SequenceRegressor + ?Sized>(
    net: &R,
    split: &SplitDataset,
    scaler: &ScalerParams,
) -> Result<MetricsReport, LstmError> {
    let (actual, predicted) = test_predictions(net, split, scaler)?;
    metrics::evaluate(&actual, &predicted).map_err(|e| LstmError::InsufficientData(e.to_string()))
}

/// Recursive multi-step forecast: each prediction is appended to the window
/// (oldest value dropped) and fed back in. Returns prices.
///
/// Errors compound with the horizon; nothing here damps the feedback loop.
pub fn future_forecast<R: SequenceRegressor + ?Sized>(
    net: &R,
    scaler: &ScalerParams,
    last_window: &[f64],
    days: usize,
) -> Result<Vec<f64>, LstmError> {
    if last_window.len() != net.lookback() {
        return Err(LstmError::Shape(format!(
            "last window has {} values, expected {}",
            last_window.len(),
            net.lookback()
        )));
    }
    let mut window = last_window.to_vec();
    let mut out = Vec::with_capacity(days);
    for _ in 0..days {
        let next = net.predict(&window)?;
        window.remove(0);
        window.push(next);
        out.push(scaler.inverse_transform(next));
    }
    Ok(out)
}
