//! AdamW: Adam with decoupled weight decay.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::tensor::Scalar;
use crate::nn::unet::{ModelGrads, ModelParams};

/// Optimizer hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub weight_decay: f64,
    pub epsilon: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        AdamWConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            weight_decay: 1e-2,
            epsilon: 1e-8,
        }
    }
}

/// Step counter plus first/second moment buffers congruent to the model
/// parameters (one flat buffer per conv layer: weights then bias).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<T: Scalar> {
    pub config: AdamWConfig,
    pub step: u64,
    pub m: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
}

impl<T: Scalar> OptimizerState<T> {
    pub fn new(config: AdamWConfig, params: &ModelParams<T>) -> Self {
        let m = params
            .layers
            .iter()
            .map(|l| vec![T::zero(); l.param_count()])
            .collect::<Vec<_>>();
        let v = m.clone();
        OptimizerState {
            config,
            step: 0,
            m,
            v,
        }
    }
}

/// One AdamW update:
/// `theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * theta)`
/// with bias-corrected moments. Rejects non-finite gradients.
pub fn adamw_step<T: Scalar>(
    state: &mut OptimizerState<T>,
    params: &mut ModelParams<T>,
    grads: &ModelGrads<T>,
) -> Result<()> {
    if params.layers.len() != grads.layers.len() || params.layers.len() != state.m.len() {
        return Err(Error::ShapeMismatch(
            "adamw: params/grads/state layer counts differ".into(),
        ));
    }
    if !grads.all_finite() {
        return Err(Error::Numerical("adamw: non-finite gradient".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let cfg = state.config;
    let lr = T::from_f64(cfg.lr);
    let b1 = T::from_f64(cfg.beta1);
    let b2 = T::from_f64(cfg.beta2);
    let wd = T::from_f64(cfg.weight_decay);
    let eps = T::from_f64(cfg.epsilon);
    let one = T::one();
    let bc1 = T::from_f64(1.0 - cfg.beta1.powi(t));
    let bc2 = T::from_f64(1.0 - cfg.beta2.powi(t));
    for (layer_idx, layer) in params.layers.iter_mut().enumerate() {
        let g_layer = &grads.layers[layer_idx];
        let m = &mut state.m[layer_idx];
        let v = &mut state.v[layer_idx];
        let n_w = layer.weights.len();
        let theta_grad = layer
            .weights
            .iter_mut()
            .chain(layer.bias.iter_mut())
            .zip(g_layer.weights.iter().chain(g_layer.bias.iter()));
        for (i, (theta, &g)) in theta_grad.enumerate() {
            m[i] = b1 * m[i] + (one - b1) * g;
            v[i] = b2 * v[i] + (one - b2) * g * g;
            let m_hat = m[i] / bc1;
            let v_hat = v[i] / bc2;
            // decay applies to weights only if desired; here uniformly, the
            // biases start at zero and stay small either way
            let _ = n_w;
            *theta = *theta - lr * (m_hat / (v_hat.sqrt() + eps) + wd * *theta);
        }
    }
    Ok(())
}
