use super::train::TrainConfig;

/// First and second moment estimates for a list of parameter buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new(buffer_lens: &[usize]) -> Self {
        Self {
            m: buffer_lens.iter().map(|&n| vec![0.0; n]).collect(),
            v: buffer_lens.iter().map(|&n| vec![0.0; n]).collect(),
            t: 0,
        }
    }

    pub fn for_network(net: &super::LstmNetwork) -> Self {
        let lens: Vec<usize> = net.param_slices().iter().map(|s| s.len()).collect();
        Self::new(&lens)
    }

    /// Number of updates applied so far.
    pub fn timestep(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam update:
/// `m <- b1 m + (1-b1) g`, `v <- b2 v + (1-b2) g^2`,
/// `theta <- theta - lr * m_hat / (sqrt(v_hat) + eps)`.
pub fn adam_step(state: &mut AdamState, params: &mut [&mut [f64]], grads: &[&[f64]], config: &TrainConfig) {
    assert_eq!(params.len(), state.m.len(), "parameter buffer count");
    assert_eq!(grads.len(), state.m.len(), "gradient buffer count");
    state.t += 1;
    let (b1, b2) = (config.adam_beta1, config.adam_beta2);
    let bias1 = 1.0 - b1.powi(state.t as i32);
    let bias2 = 1.0 - b2.powi(state.t as i32);
    for (k, (param, grad)) in params.iter_mut().zip(grads).enumerate() {
        assert_eq!(param.len(), grad.len(), "buffer {k} length");
        let (m, v) = (&mut state.m[k], &mut state.v[k]);
        for j in 0..param.len() {
            let g = grad[j];
            m[j] = b1 * m[j] + (1.0 - b1) * g;
            v[j] = b2 * v[j] + (1.0 - b2) * g * g;
            let m_hat = m[j] / bias1;
            let v_hat = v[j] / bias2;
            param[j] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.adam_epsilon);
        }
    }
}
