//! Elementwise and structural layers: ReLU, 2x2 max pooling, 2x2
//! nearest-neighbor upsampling, channel concatenation, and the L2 loss.

use crate::error::{Error, Result};
use crate::nn::tensor::{Scalar, Tensor4};

pub fn relu_forward<T: Scalar>(input: &Tensor4<T>) -> Tensor4<T> {
    input.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// `grad_in = grad_out * 1[input > 0]`.
pub fn relu_backward<T: Scalar>(input: &Tensor4<T>, grad_out: &Tensor4<T>) -> Tensor4<T> {
    let (n, c, h, w) = input.shape();
    let data = input
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&x, &g)| if x > T::zero() { g } else { T::zero() })
        .collect();
    Tensor4::from_vec(data, n, c, h, w)
}

/// 2x2 max pooling with stride 2. Returns the pooled tensor and the flat
/// argmax index (into the input item) per output element, for backward.
pub fn maxpool2x2_forward<T: Scalar>(input: &Tensor4<T>) -> Result<(Tensor4<T>, Vec<u32>)> {
    let (n, c, h, w) = input.shape();
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "maxpool2x2 requires even spatial dims, got {h}x{w}"
        )));
    }
    let (oh, ow) = (h / 2, w / 2);
    let mut out = Tensor4::zeros(n, c, oh, ow);
    let mut argmax = vec![0u32; n * c * oh * ow];
    let mut oi = 0usize;
    for item in 0..n {
        let src = input.item(item);
        for ch in 0..c {
            let plane = ch * h * w;
            for oy in 0..oh {
                for ox in 0..ow {
                    let base = plane + (2 * oy) * w + 2 * ox;
                    let cands = [base, base + 1, base + w, base + w + 1];
                    let mut best = cands[0];
                    for &cand in &cands[1..] {
                        if src[cand] > src[best] {
                            best = cand;
                        }
                    }
                    out.data_mut()[oi] = src[best];
                    argmax[oi] = best as u32;
                    oi += 1;
                }
            }
        }
    }
    Ok((out, argmax))
}

/// Routes each output gradient back to the recorded argmax position.
pub fn maxpool2x2_backward<T: Scalar>(
    grad_out: &Tensor4<T>,
    argmax: &[u32],
    input_shape: (usize, usize, usize, usize),
) -> Tensor4<T> {
    let (n, c, h, w) = input_shape;
    let mut grad_in = Tensor4::zeros(n, c, h, w);
    let per_item = grad_out.channels() * grad_out.height() * grad_out.width();
    for item in 0..n {
        let dst = grad_in.item_mut(item);
        let src = grad_out.item(item);
        let idxs = &argmax[item * per_item..(item + 1) * per_item];
        for (g, &idx) in src.iter().zip(idxs) {
            dst[idx as usize] = dst[idx as usize] + *g;
        }
    }
    grad_in
}

/// 2x2 nearest-neighbor upsampling (each pixel replicated into a 2x2 block).
pub fn upsample2x2_forward<T: Scalar>(input: &Tensor4<T>) -> Tensor4<T> {
    let (n, c, h, w) = input.shape();
    let mut out = Tensor4::zeros(n, c, 2 * h, 2 * w);
    for item in 0..n {
        for ch in 0..c {
            for y in 0..h {
                for x in 0..w {
                    let v = input.at(item, ch, y, x);
                    *out.at_mut(item, ch, 2 * y, 2 * x) = v;
                    *out.at_mut(item, ch, 2 * y, 2 * x + 1) = v;
                    *out.at_mut(item, ch, 2 * y + 1, 2 * x) = v;
                    *out.at_mut(item, ch, 2 * y + 1, 2 * x + 1) = v;
                }
            }
        }
    }
    out
}

/// Each input gradient is the sum over its 2x2 replication block.
pub fn upsample2x2_backward<T: Scalar>(grad_out: &Tensor4<T>) -> Tensor4<T> {
    let (n, c, h2, w2) = grad_out.shape();
    let (h, w) = (h2 / 2, w2 / 2);
    let mut grad_in = Tensor4::zeros(n, c, h, w);
    for item in 0..n {
        for ch in 0..c {
            for y in 0..h {
                for x in 0..w {
                    let s = grad_out.at(item, ch, 2 * y, 2 * x)
                        + grad_out.at(item, ch, 2 * y, 2 * x + 1)
                        + grad_out.at(item, ch, 2 * y + 1, 2 * x)
                        + grad_out.at(item, ch, 2 * y + 1, 2 * x + 1);
                    *grad_in.at_mut(item, ch, y, x) = s;
                }
            }
        }
    }
    grad_in
}

/// Concatenate along the channel axis: `(N,a,H,W) ++ (N,b,H,W) -> (N,a+b,H,W)`.
pub fn concat_channels<T: Scalar>(a: &Tensor4<T>, b: &Tensor4<T>) -> Result<Tensor4<T>> {
    let (na, ca, ha, wa) = a.shape();
    let (nb, cb, hb, wb) = b.shape();
    if na != nb || ha != hb || wa != wb {
        return Err(Error::ShapeMismatch(format!(
            "concat: ({na},{ca},{ha},{wa}) vs ({nb},{cb},{hb},{wb})"
        )));
    }
    let mut out = Tensor4::zeros(na, ca + cb, ha, wa);
    let plane_a = ca * ha * wa;
    let plane_b = cb * hb * wb;
    for item in 0..na {
        let dst = out.item_mut(item);
        dst[..plane_a].copy_from_slice(a.item(item));
        dst[plane_a..plane_a + plane_b].copy_from_slice(b.item(item));
    }
    Ok(out)
}

/// Split a channel-concatenated gradient back into its two parts.
pub fn split_channels<T: Scalar>(
    grad: &Tensor4<T>,
    ca: usize,
) -> (Tensor4<T>, Tensor4<T>) {
    let (n, c, h, w) = grad.shape();
    let cb = c - ca;
    let mut a = Tensor4::zeros(n, ca, h, w);
    let mut b = Tensor4::zeros(n, cb, h, w);
    let plane_a = ca * h * w;
    for item in 0..n {
        let src = grad.item(item);
        a.item_mut(item).copy_from_slice(&src[..plane_a]);
        b.item_mut(item).copy_from_slice(&src[plane_a..]);
    }
    (a, b)
}

/// Mean squared error over all elements, with the gradient w.r.t. `pred`.
pub fn mse_loss<T: Scalar>(pred: &Tensor4<T>, target: &Tensor4<T>) -> Result<(T, Tensor4<T>)> {
    if pred.shape() != target.shape() {
        return Err(Error::ShapeMismatch(format!(
            "mse_loss: {:?} vs {:?}",
            pred.shape(),
            target.shape()
        )));
    }
    let count = T::from_f64(pred.len() as f64);
    let mut sum = T::zero();
    let (n, c, h, w) = pred.shape();
    let mut grad = Tensor4::zeros(n, c, h, w);
    let two = T::from_f64(2.0);
    for ((g, &p), &t) in grad.data_mut().iter_mut().zip(pred.data()).zip(target.data()) {
        let d = p - t;
        sum = sum + d * d;
        *g = two * d / count;
    }
    Ok((sum / count, grad))
}
