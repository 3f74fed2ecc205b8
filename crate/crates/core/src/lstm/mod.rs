//! Two-layer LSTM regressor written from scratch.
//!
//! Topology: `lstm(in -> hidden, full sequence) -> dropout -> lstm(hidden ->
//! hidden, last state) -> dropout -> dense(hidden -> 1)`. Gates are stored
//! in the order input, forget, cell, output; each layer keeps its input
//! kernel `W` (`4h x in`), recurrent kernel `U` (`4h x h`) and bias `b`
//! (`4h`) gate-major and row-major.

mod adam;
mod persist;
mod train;

pub use adam::{adam_step, AdamState};
pub use persist::{load_model, read_model, save_model, write_model, MODEL_FORMAT_VERSION, MODEL_HEADER};
pub use train::{
    evaluate, future_forecast, predict_series, test_predictions, train, train_with_progress, SequenceRegressor, TrainConfig,
    TrainReport,
};

use thiserror::Error;

use crate::rng::{self, Prng};

pub const GATE_INPUT: usize = 0;
pub const GATE_FORGET: usize = 1;
pub const GATE_CELL: usize = 2;
pub const GATE_OUTPUT: usize = 3;

pub const DEFAULT_HIDDEN: usize = 50;
pub const DEFAULT_LOOKBACK: usize = 60;
pub const DEFAULT_DROPOUT: f64 = 0.2;

/// Stream ids for [`rng::derived`].
pub const STREAM_INIT: u64 = 1;
pub const STREAM_DROPOUT: u64 = 2;
pub const STREAM_SHUFFLE: u64 = 3;

#[derive(Debug, Error)]
pub enum LstmError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported model format version {0}")]
    FormatVersion(String),
    #[error("model checksum mismatch or missing: {0}")]
    Checksum(String),
    #[error("malformed model file: {0}")]
    Format(String),
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayerWeights {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub b: Vec<f64>,
}

impl LstmLayerWeights {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dim,
            w: vec![0.0; 4 * hidden_dim * input_dim],
            u: vec![0.0; 4 * hidden_dim * hidden_dim],
            b: vec![0.0; 4 * hidden_dim],
        }
    }

    /// `4 * ((in + h) * h + h)`.
    pub fn param_count(&self) -> usize {
        layer_param_count(self.input_dim, self.hidden_dim)
    }

    /// Input kernel of one gate, `h x in`.
    pub fn w_gate(&self, gate: usize) -> &[f64] {
        let n = self.hidden_dim * self.input_dim;
        &self.w[gate * n..(gate + 1) * n]
    }

    /// Recurrent kernel of one gate, `h x h`.
    pub fn u_gate(&self, gate: usize) -> &[f64] {
        let n = self.hidden_dim * self.hidden_dim;
        &self.u[gate * n..(gate + 1) * n]
    }

    pub fn b_gate(&self, gate: usize) -> &[f64] {
        &self.b[gate * self.hidden_dim..(gate + 1) * self.hidden_dim]
    }

    fn check(&self, name: &str) -> Result<(), LstmError> {
        let (i, h) = (self.input_dim, self.hidden_dim);
        if i == 0 || h == 0 || self.w.len() != 4 * h * i || self.u.len() != 4 * h * h || self.b.len() != 4 * h {
            return Err(LstmError::Shape(format!(
                "{name}: inconsistent buffers for in={i}, hidden={h} (w={}, u={}, b={})",
                self.w.len(),
                self.u.len(),
                self.b.len()
            )));
        }
        Ok(())
    }
}

pub fn layer_param_count(input_dim: usize, hidden_dim: usize) -> usize {
    4 * ((input_dim + hidden_dim) * hidden_dim + hidden_dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkShape {
    pub input_dim: usize,
    pub hidden: usize,
    pub lookback: usize,
}

impl Default for NetworkShape {
    fn default() -> Self {
        Self {
            input_dim: 1,
            hidden: DEFAULT_HIDDEN,
            lookback: DEFAULT_LOOKBACK,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmNetwork {
    pub layer1: LstmLayerWeights,
    pub layer2: LstmLayerWeights,
    pub dense_w: Vec<f64>,
    pub dense_b: f64,
    pub dropout_rate: f64,
    pub seed: u64,
    pub lookback: usize,
}

/// Per-layer parameter counts plus the total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamCounts {
    pub layer1: usize,
    pub layer2: usize,
    pub dense: usize,
    pub total: usize,
}

impl LstmNetwork {
    /// Network with every weight and bias zero (it predicts `dense_b`, i.e. 0).
    pub fn zeros(shape: NetworkShape, dropout_rate: f64, seed: u64) -> Result<Self, LstmError> {
        validate_shape(shape, dropout_rate)?;
        Ok(Self {
            layer1: LstmLayerWeights::zeros(shape.input_dim, shape.hidden),
            layer2: LstmLayerWeights::zeros(shape.hidden, shape.hidden),
            dense_w: vec![0.0; shape.hidden],
            dense_b: 0.0,
            dropout_rate,
            seed,
            lookback: shape.lookback,
        })
    }

    /// All-zero weights with the dense bias set, so every prediction is `value`.
    pub fn constant(shape: NetworkShape, value: f64) -> Result<Self, LstmError> {
        let mut net = Self::zeros(shape, 0.0, 0)?;
        net.dense_b = value;
        Ok(net)
    }

    pub fn shape(&self) -> NetworkShape {
        NetworkShape {
            input_dim: self.layer1.input_dim,
            hidden: self.layer1.hidden_dim,
            lookback: self.lookback,
        }
    }

    pub fn param_counts(&self) -> ParamCounts {
        let layer1 = self.layer1.param_count();
        let layer2 = self.layer2.param_count();
        let dense = self.dense_w.len() + 1;
        ParamCounts {
            layer1,
            layer2,
            dense,
            total: layer1 + layer2 + dense,
        }
    }

    pub fn param_count(&self) -> usize {
        self.param_counts().total
    }

    /// Parameter buffers in canonical order: layer1 `w, u, b`, layer2 `w, u, b`,
    /// dense weights, dense bias.
    pub fn param_slices(&self) -> [&[f64]; 8] {
        [
            &self.layer1.w,
            &self.layer1.u,
            &self.layer1.b,
            &self.layer2.w,
            &self.layer2.u,
            &self.layer2.b,
            &self.dense_w,
            std::slice::from_ref(&self.dense_b),
        ]
    }

    pub fn param_slices_mut(&mut self) -> [&mut [f64]; 8] {
        [
            &mut self.layer1.w,
            &mut self.layer1.u,
            &mut self.layer1.b,
            &mut self.layer2.w,
            &mut self.layer2.u,
            &mut self.layer2.b,
            &mut self.dense_w,
            std::slice::from_mut(&mut self.dense_b),
        ]
    }

    /// CRC32 (hex) over the little-endian bytes of every parameter in canonical order.
    pub fn param_checksum(&self) -> String {
        let mut hasher = crc32fast::Hasher::new();
        for slice in self.param_slices() {
            for v in slice {
                hasher.update(&v.to_le_bytes());
            }
        }
        format!("{:08x}", hasher.finalize())
    }

    pub fn validate(&self) -> Result<(), LstmError> {
        validate_shape(self.shape(), self.dropout_rate)?;
        self.layer1.check("layer1")?;
        self.layer2.check("layer2")?;
        if self.layer2.input_dim != self.layer1.hidden_dim || self.layer2.hidden_dim != self.layer1.hidden_dim {
            return Err(LstmError::Shape("layer2 must map hidden -> hidden".into()));
        }
        if self.dense_w.len() != self.layer2.hidden_dim {
            return Err(LstmError::Shape(format!(
                "dense head has {} weights for hidden {}",
                self.dense_w.len(),
                self.layer2.hidden_dim
            )));
        }
        Ok(())
    }
}

fn validate_shape(shape: NetworkShape, dropout_rate: f64) -> Result<(), LstmError> {
    if shape.input_dim == 0 || shape.hidden == 0 || shape.lookback == 0 {
        return Err(LstmError::InvalidConfig(format!(
            "dimensions must be positive: {shape:?}"
        )));
    }
    if !(0.0..1.0).contains(&dropout_rate) {
        return Err(LstmError::InvalidConfig(format!(
            "dropout rate must lie in [0, 1), got {dropout_rate}"
        )));
    }
    Ok(())
}

/// Glorot-uniform kernels (limit `sqrt(6 / (fan_in + fan_out))` per gate
/// matrix), zero biases except forget gates at 1.0.
///
/// Draw order: layer1 `W` gates i,f,c,o, layer1 `U` gates, layer2 likewise,
/// then the dense weights; all from `rng::derived(seed, 1)`.
pub fn init_network(seed: u64, shape: NetworkShape, dropout_rate: f64) -> Result<LstmNetwork, LstmError> {
    let mut net = LstmNetwork::zeros(shape, dropout_rate, seed)?;
    let mut rng = rng::derived(seed, STREAM_INIT);
    for layer in [&mut net.layer1, &mut net.layer2] {
        let (n_in, h) = (layer.input_dim, layer.hidden_dim);
        let w_limit = (6.0 / (n_in + h) as f64).sqrt();
        let u_limit = (6.0 / (2 * h) as f64).sqrt();
        for v in layer.w.iter_mut() {
            *v = rng::symmetric(&mut rng, w_limit);
        }
        for v in layer.u.iter_mut() {
            *v = rng::symmetric(&mut rng, u_limit);
        }
        for v in &mut layer.b[GATE_FORGET * h..(GATE_FORGET + 1) * h] {
            *v = 1.0;
        }
    }
    let dense_limit = (6.0 / (shape.hidden + 1) as f64).sqrt();
    for v in net.dense_w.iter_mut() {
        *v = rng::symmetric(&mut rng, dense_limit);
    }
    Ok(net)
}

/// Activations of one layer over a sequence.
#[derive(Debug, Clone)]
struct LayerTrace {
    /// `T x 4h`: activated gates i, f, g, o.
    gates: Vec<f64>,
    /// `T x h` cell states.
    c: Vec<f64>,
    /// `T x h` `tanh(c)`.
    tanh_c: Vec<f64>,
    /// `T x h` hidden states.
    h: Vec<f64>,
}

fn layer_forward(layer: &LstmLayerWeights, input: &[f64], steps: usize) -> LayerTrace {
    let (n_in, h) = (layer.input_dim, layer.hidden_dim);
    let mut trace = LayerTrace {
        gates: vec![0.0; steps * 4 * h],
        c: vec![0.0; steps * h],
        tanh_c: vec![0.0; steps * h],
        h: vec![0.0; steps * h],
    };
    let zero = vec![0.0; h];
    let mut z = vec![0.0; 4 * h];
    for t in 0..steps {
        let x = &input[t * n_in..(t + 1) * n_in];
        let (h_prev, c_prev) = if t == 0 {
            (&zero[..], &zero[..])
        } else {
            (&trace.h[(t - 1) * h..t * h], &trace.c[(t - 1) * h..t * h])
        };
        for (r, zr) in z.iter_mut().enumerate() {
            let wr = &layer.w[r * n_in..(r + 1) * n_in];
            let ur = &layer.u[r * h..(r + 1) * h];
            *zr = layer.b[r] + dot(wr, x) + dot(ur, h_prev);
        }
        let mut gates = vec![0.0; 4 * h];
        let mut c = vec![0.0; h];
        let mut tc = vec![0.0; h];
        let mut hs = vec![0.0; h];
        for k in 0..h {
            let i = sigmoid(z[k]);
            let f = sigmoid(z[h + k]);
            let g = z[2 * h + k].tanh();
            let o = sigmoid(z[3 * h + k]);
            gates[k] = i;
            gates[h + k] = f;
            gates[2 * h + k] = g;
            gates[3 * h + k] = o;
            c[k] = f * c_prev[k] + i * g;
            tc[k] = c[k].tanh();
            hs[k] = o * tc[k];
        }
        trace.gates[t * 4 * h..(t + 1) * 4 * h].copy_from_slice(&gates);
        trace.c[t * h..(t + 1) * h].copy_from_slice(&c);
        trace.tanh_c[t * h..(t + 1) * h].copy_from_slice(&tc);
        trace.h[t * h..(t + 1) * h].copy_from_slice(&hs);
    }
    trace
}

/// Backpropagation through time for one layer. `dh_ext` (`T x h`) is the
/// loss gradient arriving at each emitted hidden state. Parameter gradients
/// accumulate into `grads`; the input gradient (`T x in`) is returned.
fn layer_backward(
    layer: &LstmLayerWeights,
    input: &[f64],
    trace: &LayerTrace,
    dh_ext: &[f64],
    steps: usize,
    grads: &mut LstmLayerWeights,
) -> Vec<f64> {
    let (n_in, h) = (layer.input_dim, layer.hidden_dim);
    let zero = vec![0.0; h];
    let mut dx = vec![0.0; steps * n_in];
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];
    let mut dz = vec![0.0; 4 * h];
    for t in (0..steps).rev() {
        let gates = &trace.gates[t * 4 * h..(t + 1) * 4 * h];
        let tanh_c = &trace.tanh_c[t * h..(t + 1) * h];
        let (h_prev, c_prev) = if t == 0 {
            (&zero[..], &zero[..])
        } else {
            (&trace.h[(t - 1) * h..t * h], &trace.c[(t - 1) * h..t * h])
        };
        for k in 0..h {
            let (i, f, g, o) = (gates[k], gates[h + k], gates[2 * h + k], gates[3 * h + k]);
            let dh = dh_ext[t * h + k] + dh_next[k];
            let tc = tanh_c[k];
            let d_o = dh * tc;
            let dc = dh * o * (1.0 - tc * tc) + dc_next[k];
            dz[k] = dc * g * i * (1.0 - i);
            dz[h + k] = dc * c_prev[k] * f * (1.0 - f);
            dz[2 * h + k] = dc * i * (1.0 - g * g);
            dz[3 * h + k] = d_o * o * (1.0 - o);
            dc_next[k] = dc * f;
        }
        let x = &input[t * n_in..(t + 1) * n_in];
        let dx_t = &mut dx[t * n_in..(t + 1) * n_in];
        dh_next.iter_mut().for_each(|v| *v = 0.0);
        for (r, &dzr) in dz.iter().enumerate() {
            grads.b[r] += dzr;
            axpy(dzr, x, &mut grads.w[r * n_in..(r + 1) * n_in]);
            axpy(dzr, h_prev, &mut grads.u[r * h..(r + 1) * h]);
            axpy(dzr, &layer.w[r * n_in..(r + 1) * n_in], dx_t);
            axpy(dzr, &layer.u[r * h..(r + 1) * h], &mut dh_next);
        }
    }
    dx
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Forward-pass mode. Dropout is active only in `Train`, with masks drawn
/// from the supplied generator.
pub enum Mode<'a> {
    Infer,
    Train(&'a mut Prng),
}

/// Everything the backward pass needs from one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    steps: usize,
    l1: LayerTrace,
    /// Scaled keep mask over layer1's outputs (`T x h`), if dropout ran.
    mask1: Option<Vec<f64>>,
    /// Layer2 input: layer1 outputs after dropout.
    l2_input: Vec<f64>,
    l2: LayerTrace,
    mask2: Option<Vec<f64>>,
    /// Dense input: layer2's final state after dropout.
    head_input: Vec<f64>,
    pub prediction: f64,
}

fn dropout_mask(rng: &mut Prng, len: usize, rate: f64) -> Vec<f64> {
    let scale = 1.0 / (1.0 - rate);
    (0..len)
        .map(|_| if rng::unit_f64(rng) >= rate { scale } else { 0.0 })
        .collect()
}

/// Runs one window (`lookback x input_dim` values, time-major) through the network.
pub fn forward(net: &LstmNetwork, window: &[f64], mode: Mode<'_>) -> Result<(f64, ForwardCache), LstmError> {
    let n_in = net.layer1.input_dim;
    let h = net.layer1.hidden_dim;
    if window.len() != net.lookback * n_in {
        return Err(LstmError::Shape(format!(
            "window has {} values, expected lookback {} x input_dim {}",
            window.len(),
            net.lookback,
            n_in
        )));
    }
    let steps = net.lookback;
    let mut rng = match mode {
        Mode::Train(rng) if net.dropout_rate > 0.0 => Some(rng),
        _ => None,
    };

    let l1 = layer_forward(&net.layer1, window, steps);
    let mask1 = rng.as_deref_mut().map(|r| dropout_mask(r, steps * h, net.dropout_rate));
    let l2_input = match &mask1 {
        Some(m) => l1.h.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => l1.h.clone(),
    };
    let l2 = layer_forward(&net.layer2, &l2_input, steps);
    let last = &l2.h[(steps - 1) * h..steps * h];
    let mask2 = rng.map(|r| dropout_mask(r, h, net.dropout_rate));
    let head_input: Vec<f64> = match &mask2 {
        Some(m) => last.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => last.to_vec(),
    };
    let prediction = net.dense_b + dot(&net.dense_w, &head_input);
    Ok((
        prediction,
        ForwardCache {
            input: window.to_vec(),
            steps,
            l1,
            mask1,
            l2_input,
            l2,
            mask2,
            head_input,
            prediction,
        },
    ))
}

/// Gradients with the same layout as [`LstmNetwork`]'s parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layer1: LstmLayerWeights,
    pub layer2: LstmLayerWeights,
    pub dense_w: Vec<f64>,
    pub dense_b: f64,
}

impl Gradients {
    pub fn zeros_like(net: &LstmNetwork) -> Self {
        Self {
            layer1: LstmLayerWeights::zeros(net.layer1.input_dim, net.layer1.hidden_dim),
            layer2: LstmLayerWeights::zeros(net.layer2.input_dim, net.layer2.hidden_dim),
            dense_w: vec![0.0; net.dense_w.len()],
            dense_b: 0.0,
        }
    }

    /// Same canonical order as [`LstmNetwork::param_slices`].
    pub fn slices(&self) -> [&[f64]; 8] {
        [
            &self.layer1.w,
            &self.layer1.u,
            &self.layer1.b,
            &self.layer2.w,
            &self.layer2.u,
            &self.layer2.b,
            &self.dense_w,
            std::slice::from_ref(&self.dense_b),
        ]
    }

    fn slices_mut(&mut self) -> [&mut [f64]; 8] {
        [
            &mut self.layer1.w,
            &mut self.layer1.u,
            &mut self.layer1.b,
            &mut self.layer2.w,
            &mut self.layer2.u,
            &mut self.layer2.b,
            &mut self.dense_w,
            std::slice::from_mut(&mut self.dense_b),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.slices()
            .iter()
            .flat_map(|s| s.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn scale(&mut self, factor: f64) {
        for s in self.slices_mut() {
            s.iter_mut().for_each(|v| *v *= factor);
        }
    }
}

/// Accumulates `d(loss)/d(params)` for one cached forward pass given the
/// gradient of the loss with respect to its prediction.
fn backward(net: &LstmNetwork, cache: &ForwardCache, d_pred: f64, grads: &mut Gradients) {
    let h = net.layer1.hidden_dim;
    let steps = cache.steps;
    grads.dense_b += d_pred;
    axpy(d_pred, &cache.head_input, &mut grads.dense_w);

    let mut dh2 = vec![0.0; steps * h];
    let last = &mut dh2[(steps - 1) * h..];
    for (k, v) in last.iter_mut().enumerate() {
        let m = cache.mask2.as_ref().map_or(1.0, |m| m[k]);
        *v = d_pred * net.dense_w[k] * m;
    }
    let d_l2_input = layer_backward(&net.layer2, &cache.l2_input, &cache.l2, &dh2, steps, &mut grads.layer2);
    let dh1: Vec<f64> = match &cache.mask1 {
        Some(m) => d_l2_input.iter().zip(m).map(|(a, b)| a * b).collect(),
        None => d_l2_input,
    };
    layer_backward(&net.layer1, &cache.input, &cache.l1, &dh1, steps, &mut grads.layer1);
}

/// Mean squared error over the batch and its gradient with respect to every
/// parameter (gradient of the mean). Passing `Some(rng)` runs in training
/// mode: dropout masks are drawn from `rng` in batch order.
pub fn loss_and_gradients(
    net: &LstmNetwork,
    batch: &[(&[f64], f64)],
    mut dropout_rng: Option<&mut Prng>,
) -> Result<(f64, Gradients), LstmError> {
    if batch.is_empty() {
        return Err(LstmError::InsufficientData("empty batch".into()));
    }
    let n = batch.len() as f64;
    let mut grads = Gradients::zeros_like(net);
    let mut sse = 0.0;
    for (window, target) in batch {
        let mode = match dropout_rng.as_deref_mut() {
            Some(r) => Mode::Train(r),
            None => Mode::Infer,
        };
        let (pred, cache) = forward(net, window, mode)?;
        let residual = pred - target;
        sse += residual * residual;
        backward(net, &cache, 2.0 * residual, &mut grads);
    }
    grads.scale(1.0 / n);
    Ok((sse / n, grads))
}

/// Batch MSE without gradients.
pub fn batch_loss(
    net: &LstmNetwork,
    batch: &[(&[f64], f64)],
    mut dropout_rng: Option<&mut Prng>,
) -> Result<f64, LstmError> {
    if batch.is_empty() {
        return Err(LstmError::InsufficientData("empty batch".into()));
    }
    let mut sse = 0.0;
    for (window, target) in batch {
        let mode = match dropout_rng.as_deref_mut() {
            Some(r) => Mode::Train(r),
            None => Mode::Infer,
        };
        let (pred, _) = forward(net, window, mode)?;
        sse += (pred - target).powi(2);
    }
    Ok(sse / batch.len() as f64)
}
