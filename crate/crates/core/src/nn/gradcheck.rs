//! Finite-difference verification of the analytic parameter gradients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nn::ops::mse_loss;
use crate::nn::tensor::Tensor4;
use crate::nn::unet::{ModelGrads, ModelParams};

/// Compare analytic gradients of `mse_loss(forward(input), target)` against
/// central finite differences on a random subsample of parameters.
///
/// Runs in f64. Returns the maximum relative error over the sampled
/// parameters. `sample_count` is clamped to the parameter count; at least
/// 200 parameters are sampled when available.
pub fn grad_check(
    params: &ModelParams<f64>,
    input: &Tensor4<f64>,
    target: &Tensor4<f64>,
    epsilon: f64,
    sample_count: usize,
    seed: u64,
) -> Result<f64> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidArgument("grad_check: epsilon must be positive".into()));
    }
    let (out, cache) = params.forward_cached(input)?;
    let (_, grad_out) = mse_loss(&out, target)?;
    let mut grads = ModelGrads::zeros_like(params);
    params.backward(&cache, &grad_out, &mut grads)?;

    let total = params.param_count();
    let n_samples = sample_count.max(200).min(total);
    let mut indices: Vec<usize> = (0..total).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    indices.truncate(n_samples);

    let loss_at = |p: &ModelParams<f64>| -> Result<f64> {
        let out = p.forward(input)?;
        Ok(mse_loss(&out, target)?.0)
    };

    let mut max_rel = 0.0f64;
    let mut perturbed = params.clone();
    for flat in indices {
        let analytic = read_flat_grad(&grads, flat);
        let orig = read_flat_param(&perturbed, flat);
        write_flat_param(&mut perturbed, flat, orig + epsilon);
        let f_plus = loss_at(&perturbed)?;
        write_flat_param(&mut perturbed, flat, orig - epsilon);
        let f_minus = loss_at(&perturbed)?;
        write_flat_param(&mut perturbed, flat, orig);
        let fd = (f_plus - f_minus) / (2.0 * epsilon);
        let denom = analytic.abs().max(fd.abs()).max(1e-6);
        max_rel = max_rel.max((analytic - fd).abs() / denom);
    }
    Ok(max_rel)
}

fn locate(params: &ModelParams<f64>, flat: usize) -> (usize, usize) {
    let mut offset = flat;
    for (i, layer) in params.layers.iter().enumerate() {
        let n = layer.param_count();
        if offset < n {
            return (i, offset);
        }
        offset -= n;
    }
    panic!("flat index out of range");
}

fn read_flat_param(params: &ModelParams<f64>, flat: usize) -> f64 {
    let (layer, idx) = locate(params, flat);
    let l = &params.layers[layer];
    if idx < l.weights.len() {
        l.weights[idx]
    } else {
        l.bias[idx - l.weights.len()]
    }
}

fn write_flat_param(params: &mut ModelParams<f64>, flat: usize, value: f64) {
    let (layer, idx) = locate(params, flat);
    let l = &mut params.layers[layer];
    if idx < l.weights.len() {
        l.weights[idx] = value;
    } else {
        l.bias[idx - l.weights.len()] = value;
    }
}

fn read_flat_grad(grads: &ModelGrads<f64>, mut flat: usize) -> f64 {
    for layer in &grads.layers {
        let n = layer.weights.len() + layer.bias.len();
        if flat < n {
            return if flat < layer.weights.len() {
                layer.weights[flat]
            } else {
                layer.bias[flat - layer.weights.len()]
            };
        }
        flat -= n;
    }
    panic!("flat index out of range");
}
