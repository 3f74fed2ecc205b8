//! Scaling, differencing, windowing and chronological splitting.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("degenerate range: min == max == {0}")]
    DegenerateRange(f64),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Min/max pair for 0–1 scaling. `max > min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    min: f64,
    max: f64,
}

impl ScalerParams {
    pub fn new(min: f64, max: f64) -> Result<Self, PreprocessError> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(PreprocessError::InvalidArgument(format!(
                "scaler bounds must be finite (min={min}, max={max})"
            )));
        }
        if max <= min {
            if max == min {
                return Err(PreprocessError::DegenerateRange(min));
            }
            return Err(PreprocessError::InvalidArgument(format!(
                "scaler max {max} below min {min}"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// `(x - min) / (max - min)`; values outside the fitted range map outside [0, 1].
    pub fn transform(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn inverse_transform(&self, y: f64) -> f64 {
        y * (self.max - self.min) + self.min
    }

    pub fn transform_all(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.transform(x)).collect()
    }

    pub fn inverse_all(&self, ys: &[f64]) -> Vec<f64> {
        ys.iter().map(|&y| self.inverse_transform(y)).collect()
    }
}

pub fn fit_scaler(values: &[f64]) -> Result<ScalerParams, PreprocessError> {
    if values.is_empty() {
        return Err(PreprocessError::InsufficientData(
            "cannot fit a scaler on an empty series".into(),
        ));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(PreprocessError::InvalidArgument(format!(
            "non-finite value {bad}"
        )));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ScalerParams::new(min, max)
}

/// Applies the first difference `d` times. Output length is `len - d`.
pub fn difference(values: &[f64], d: usize) -> Result<Vec<f64>, PreprocessError> {
    if values.len() <= d {
        return Err(PreprocessError::InsufficientData(format!(
            "differencing order {d} needs more than {d} values, got {}",
            values.len()
        )));
    }
    let mut out = values.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(out)
}

/// Integrates `d`-times-differenced values back to the original scale.
///
/// `last_originals` holds at least the final `d` original values preceding
/// the first entry of `diffs`; only its last `d` entries are used.
pub fn undifference(
    last_originals: &[f64],
    diffs: &[f64],
    d: usize,
) -> Result<Vec<f64>, PreprocessError> {
    if last_originals.len() < d {
        return Err(PreprocessError::InsufficientData(format!(
            "undifferencing order {d} needs {d} trailing originals, got {}",
            last_originals.len()
        )));
    }
    if d == 0 {
        return Ok(diffs.to_vec());
    }
    let tail = &last_originals[last_originals.len() - d..];
    // Last value of the j-th differenced tail, for j = 0..d.
    let anchors: Vec<f64> = (0..d)
        .map(|j| {
            let dj = difference(tail, j).expect("tail has d > j values");
            dj[dj.len() - 1]
        })
        .collect();
    let mut level = diffs.to_vec();
    for anchor in anchors.iter().rev() {
        let mut acc = *anchor;
        for v in level.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Ok(level)
}

/// Sliding windows over a scaled series: `inputs[i] = values[i..i+lookback]`,
/// `targets[i] = values[i+lookback]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    lookback: usize,
}

impl WindowedDataset {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>, lookback: usize) -> Result<Self, PreprocessError> {
        if lookback == 0 {
            return Err(PreprocessError::InvalidArgument("lookback must be positive".into()));
        }
        if inputs.len() != targets.len() {
            return Err(PreprocessError::InvalidArgument(format!(
                "{} inputs but {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        if let Some(bad) = inputs.iter().find(|w| w.len() != lookback) {
            return Err(PreprocessError::InvalidArgument(format!(
                "window of length {} in a lookback-{lookback} dataset",
                bad.len()
            )));
        }
        Ok(Self {
            inputs,
            targets,
            lookback,
        })
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn lookback(&self) -> usize {
        self.lookback
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.inputs.iter().map(Vec::as_slice).zip(self.targets.iter().copied())
    }
}

pub fn make_windows(values: &[f64], lookback: usize) -> Result<WindowedDataset, PreprocessError> {
    if lookback == 0 {
        return Err(PreprocessError::InvalidArgument("lookback must be positive".into()));
    }
    if values.len() <= lookback {
        return Err(PreprocessError::InsufficientData(format!(
            "{} values cannot fill a lookback-{lookback} window plus target",
            values.len()
        )));
    }
    let count = values.len() - lookback;
    let inputs = (0..count).map(|i| values[i..i + lookback].to_vec()).collect();
    let targets = values[lookback..].to_vec();
    Ok(WindowedDataset {
        inputs,
        targets,
        lookback,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: WindowedDataset,
    pub test: WindowedDataset,
    pub split_ratio: f64,
}

/// Number of training windows for `n` windows at `ratio`: `floor(ratio * n)`.
pub fn train_len(n: usize, ratio: f64) -> usize {
    (ratio * n as f64).floor() as usize
}

/// First `floor(ratio * n)` windows train, the remainder test. No shuffling.
pub fn chrono_split(ds: &WindowedDataset, ratio: f64) -> Result<SplitDataset, PreprocessError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(PreprocessError::InvalidArgument(format!(
            "split ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let n = ds.len();
    let cut = train_len(n, ratio);
    if cut == 0 || cut == n {
        return Err(PreprocessError::InsufficientData(format!(
            "{n} windows at ratio {ratio} leave an empty partition"
        )));
    }
    let part = |range: std::ops::Range<usize>| WindowedDataset {
        inputs: ds.inputs[range.clone()].to_vec(),
        targets: ds.targets[range].to_vec(),
        lookback: ds.lookback,
    };
    Ok(SplitDataset {
        train: part(0..cut),
        test: part(cut..n),
        split_ratio: ratio,
    })
}
