//! Text model files.
//!
//! ```text
//! FINCAST-MODEL v1
//! input_dim 1
//! hidden 50
//! lookback 60
//! dropout_rate 2.0000000000000001e-1
//! seed 42
//! scaler_min <float>
//! scaler_max <float>
//! block layer1.w 200
//! <one float per line>
//! ...
//! crc32 <8 hex digits>
//! ```
//!
//! Floats carry 17 significant digits, which round-trips every `f64`. The
//! trailing CRC32 covers every byte before the `crc32` line.

use std::path::Path;

use super::{LstmError, LstmNetwork, NetworkShape};
use crate::preprocess::ScalerParams;

pub const MODEL_HEADER: &str = "FINCAST-MODEL";
pub const MODEL_FORMAT_VERSION: u32 = 1;

const BLOCK_NAMES: [&str; 8] = [
    "layer1.w", "layer1.u", "layer1.b", "layer2.w", "layer2.u", "layer2.b", "dense.w", "dense.b",
];

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_model(net: &LstmNetwork, scaler: &ScalerParams) -> String {
    let shape = net.shape();
    let mut body = String::new();
    body.push_str(&format!("{MODEL_HEADER} v{MODEL_FORMAT_VERSION}\n"));
    body.push_str(&format!("input_dim {}\n", shape.input_dim));
    body.push_str(&format!("hidden {}\n", shape.hidden));
    body.push_str(&format!("lookback {}\n", shape.lookback));
    body.push_str(&format!("dropout_rate {}\n", fmt_f64(net.dropout_rate)));
    body.push_str(&format!("seed {}\n", net.seed));
    body.push_str(&format!("scaler_min {}\n", fmt_f64(scaler.min())));
    body.push_str(&format!("scaler_max {}\n", fmt_f64(scaler.max())));
    for (name, values) in BLOCK_NAMES.iter().zip(net.param_slices()) {
        body.push_str(&format!("block {name} {}\n", values.len()));
        for v in values {
            body.push_str(&fmt_f64(*v));
            body.push('\n');
        }
    }
    let crc = crc32fast::hash(body.as_bytes());
    body.push_str(&format!("crc32 {crc:08x}\n"));
    body
}

pub fn save_model(net: &LstmNetwork, scaler: &ScalerParams, path: &Path) -> Result<(), LstmError> {
    std::fs::write(path, write_model(net, scaler))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<(LstmNetwork, ScalerParams), LstmError> {
    let text = std::fs::read_to_string(path)?;
    read_model(&text)
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str, LstmError> {
        self.line += 1;
        self.inner
            .next()
            .ok_or_else(|| LstmError::Format(format!("unexpected end of file at line {}", self.line)))
    }

    fn field(&mut self, key: &str) -> Result<&'a str, LstmError> {
        let line = self.next()?;
        match line.split_once(' ') {
            Some((k, v)) if k == key => Ok(v.trim()),
            _ => Err(LstmError::Format(format!("line {}: expected `{key} <value>`, got {line:?}", self.line))),
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, LstmError> {
        let raw = self.field(key)?;
        raw.parse()
            .map_err(|_| LstmError::Format(format!("line {}: bad value for {key}: {raw:?}", self.line)))
    }
}

pub fn read_model(text: &str) -> Result<(LstmNetwork, ScalerParams), LstmError> {
    let first = text.lines().next().unwrap_or("");
    let version = first
        .strip_prefix(MODEL_HEADER)
        .and_then(|rest| rest.trim().strip_prefix('v'))
        .ok_or_else(|| LstmError::Format(format!("missing `{MODEL_HEADER} v<N>` header")))?;
    match version.parse::<u32>() {
        Ok(MODEL_FORMAT_VERSION) => {}
        _ => return Err(LstmError::FormatVersion(version.to_string())),
    }

    let trimmed = text.trim_end_matches('\n');
    let (body_len, crc_line) = match trimmed.rfind('\n') {
        Some(pos) => (pos + 1, &trimmed[pos + 1..]),
        None => (0, trimmed),
    };
    let stated = crc_line
        .strip_prefix("crc32 ")
        .ok_or_else(|| LstmError::Checksum("trailing crc32 line missing (truncated file?)".into()))?;
    let stated = u32::from_str_radix(stated.trim(), 16)
        .map_err(|_| LstmError::Checksum(format!("unreadable checksum {stated:?}")))?;
    let body = &text[..body_len];
    let actual = crc32fast::hash(body.as_bytes());
    if actual != stated {
        return Err(LstmError::Checksum(format!("stated {stated:08x}, computed {actual:08x}")));
    }

    let mut lines = Lines {
        inner: body.lines(),
        line: 0,
    };
    lines.next()?;
    let shape = NetworkShape {
        input_dim: lines.parsed("input_dim")?,
        hidden: lines.parsed("hidden")?,
        lookback: lines.parsed("lookback")?,
    };
    let dropout_rate: f64 = lines.parsed("dropout_rate")?;
    let seed: u64 = lines.parsed("seed")?;
    let scaler_min: f64 = lines.parsed("scaler_min")?;
    let scaler_max: f64 = lines.parsed("scaler_max")?;
    let scaler = ScalerParams::new(scaler_min, scaler_max)
        .map_err(|e| LstmError::Format(format!("invalid scaler: {e}")))?;

    let mut net = LstmNetwork::zeros(shape, dropout_rate, seed)?;
    for (k, name) in BLOCK_NAMES.iter().enumerate() {
        let header = lines.field("block")?;
        let expected_len = net.param_slices()[k].len();
        let (got_name, got_len) = header
            .split_once(' ')
            .ok_or_else(|| LstmError::Format(format!("malformed block header {header:?}")))?;
        if got_name != *name || got_len.parse::<usize>().ok() != Some(expected_len) {
            return Err(LstmError::Format(format!(
                "expected block `{name} {expected_len}`, got `{header}`"
            )));
        }
        for j in 0..expected_len {
            let raw = lines.next()?;
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| LstmError::Format(format!("line {}: bad float {raw:?}", lines.line)))?;
            net.param_slices_mut()[k][j] = v;
        }
    }
    if let Ok(extra) = lines.next() {
        return Err(LstmError::Format(format!("unexpected trailing content {extra:?}")));
    }
    net.validate()?;
    Ok((net, scaler))
}
