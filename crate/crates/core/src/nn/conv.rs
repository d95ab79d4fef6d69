//! 2-D convolution (cross-correlation) with same-padding, stride 1, and an
//! exact hand-written backward pass. Forward and backward are lowered to
//! GEMM via im2col / col2im.

use crate::error::{Error, Result};
use crate::nn::tensor::{Scalar, Tensor4};

/// Weights and bias of one convolution layer.
///
/// Weight layout is `(out_channels, in_channels, k, k)` row-major; same
/// layout is used for serialized checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer<T: Scalar> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: usize,
}

impl<T: Scalar> ConvLayer<T> {
    pub fn zeros(in_channels: usize, out_channels: usize, kernel: usize) -> Self {
        ConvLayer {
            weights: vec![T::zero(); out_channels * in_channels * kernel * kernel],
            bias: vec![T::zero(); out_channels],
            in_channels,
            out_channels,
            kernel,
        }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> ConvLayer<U> {
        ConvLayer {
            weights: self.weights.iter().map(|&v| f(v)).collect(),
            bias: self.bias.iter().map(|&v| f(v)).collect(),
            in_channels: self.in_channels,
            out_channels: self.out_channels,
            kernel: self.kernel,
        }
    }
}

/// Gradients congruent to a [`ConvLayer`].
#[derive(Debug, Clone)]
pub struct ConvGrads<T: Scalar> {
    pub weights: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> ConvGrads<T> {
    pub fn zeros_like(layer: &ConvLayer<T>) -> Self {
        ConvGrads {
            weights: vec![T::zero(); layer.weights.len()],
            bias: vec![T::zero(); layer.bias.len()],
        }
    }
}

/// Expand one batch item into the im2col matrix `(C*k*k, H*W)` with zero
/// same-padding. `cols` must have length `C*k*k*H*W`.
fn im2col<T: Scalar>(input: &[T], c: usize, h: usize, w: usize, kernel: usize, cols: &mut [T]) {
    let pad = kernel / 2;
    let hw = h * w;
    let mut row = 0usize;
    for ch in 0..c {
        let plane = &input[ch * hw..(ch + 1) * hw];
        for ky in 0..kernel {
            for kx in 0..kernel {
                let dst = &mut cols[row * hw..(row + 1) * hw];
                let dy = ky as isize - pad as isize;
                let dx = kx as isize - pad as isize;
                for y in 0..h {
                    let sy = y as isize + dy;
                    let drow = &mut dst[y * w..(y + 1) * w];
                    if sy < 0 || sy >= h as isize {
                        drow.fill(T::zero());
                        continue;
                    }
                    let srow = &plane[sy as usize * w..(sy as usize + 1) * w];
                    // valid x range: 0 <= x + dx < w
                    let x0 = (-dx).max(0) as usize;
                    let x1 = ((w as isize - dx).min(w as isize)).max(0) as usize;
                    drow[..x0].fill(T::zero());
                    drow[x1..].fill(T::zero());
                    for x in x0..x1 {
                        drow[x] = srow[(x as isize + dx) as usize];
                    }
                }
                row += 1;
            }
        }
    }
}

/// Scatter-add the im2col-shaped gradient back onto the input gradient.
fn col2im_acc<T: Scalar>(
    cols: &[T],
    c: usize,
    h: usize,
    w: usize,
    kernel: usize,
    grad_input: &mut [T],
) {
    let pad = kernel / 2;
    let hw = h * w;
    let mut row = 0usize;
    for ch in 0..c {
        let plane = &mut grad_input[ch * hw..(ch + 1) * hw];
        for ky in 0..kernel {
            for kx in 0..kernel {
                let src = &cols[row * hw..(row + 1) * hw];
                let dy = ky as isize - pad as isize;
                let dx = kx as isize - pad as isize;
                for y in 0..h {
                    let sy = y as isize + dy;
                    if sy < 0 || sy >= h as isize {
                        continue;
                    }
                    let srow = &src[y * w..(y + 1) * w];
                    let x0 = (-dx).max(0) as usize;
                    let x1 = ((w as isize - dx).min(w as isize)).max(0) as usize;
                    let prow = &mut plane[sy as usize * w..(sy as usize + 1) * w];
                    for x in x0..x1 {
                        let px = (x as isize + dx) as usize;
                        prow[px] = prow[px] + srow[x];
                    }
                }
                row += 1;
            }
        }
    }
}

/// Scratch buffer reused across convolution calls to avoid reallocation.
pub struct ConvScratch<T: Scalar> {
    cols: Vec<T>,
}

impl<T: Scalar> ConvScratch<T> {
    pub fn new() -> Self {
        ConvScratch { cols: Vec::new() }
    }

    fn ensure(&mut self, len: usize) -> &mut [T] {
        if self.cols.len() < len {
            self.cols.resize(len, T::zero());
        }
        &mut self.cols[..len]
    }
}

impl<T: Scalar> Default for ConvScratch<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Same-padding stride-1 cross-correlation. Output shape `(N, C_out, H, W)`.
pub fn conv2d_forward<T: Scalar>(
    input: &Tensor4<T>,
    layer: &ConvLayer<T>,
    scratch: &mut ConvScratch<T>,
) -> Result<Tensor4<T>> {
    let (n, c, h, w) = input.shape();
    if c != layer.in_channels {
        return Err(Error::ShapeMismatch(format!(
            "conv2d: input has {} channels, layer expects {}",
            c, layer.in_channels
        )));
    }
    let k = layer.kernel;
    let kk = c * k * k;
    let hw = h * w;
    let mut out = Tensor4::zeros(n, layer.out_channels, h, w);
    for item in 0..n {
        let cols = scratch.ensure(kk * hw);
        im2col(input.item(item), c, h, w, k, cols);
        let out_item = out.item_mut(item);
        for (oc, chunk) in out_item.chunks_exact_mut(hw).enumerate() {
            chunk.fill(layer.bias[oc]);
        }
        T::gemm(
            layer.out_channels,
            kk,
            hw,
            T::one(),
            &layer.weights,
            kk as isize,
            1,
            cols,
            hw as isize,
            1,
            T::one(),
            out_item,
            hw as isize,
            1,
        );
    }
    Ok(out)
}

/// Backward pass of [`conv2d_forward`]. Accumulates into `grads` and returns
/// the gradient with respect to the input.
pub fn conv2d_backward<T: Scalar>(
    input: &Tensor4<T>,
    layer: &ConvLayer<T>,
    grad_out: &Tensor4<T>,
    grads: &mut ConvGrads<T>,
    scratch: &mut ConvScratch<T>,
) -> Result<Tensor4<T>> {
    let (n, c, h, w) = input.shape();
    let (gn, gc, gh, gw) = grad_out.shape();
    if gn != n || gc != layer.out_channels || gh != h || gw != w {
        return Err(Error::ShapeMismatch(format!(
            "conv2d backward: grad_out shape ({gn},{gc},{gh},{gw}) inconsistent with forward"
        )));
    }
    let k = layer.kernel;
    let kk = c * k * k;
    let hw = h * w;
    let mut grad_input = Tensor4::zeros(n, c, h, w);
    let mut grad_cols = vec![T::zero(); kk * hw];
    for item in 0..n {
        let cols = scratch.ensure(kk * hw);
        im2col(input.item(item), c, h, w, k, cols);
        let g_item = grad_out.item(item);
        // grad_bias: sum of grad_out over spatial dims per output channel
        for (oc, chunk) in g_item.chunks_exact(hw).enumerate() {
            let mut s = T::zero();
            for &v in chunk {
                s = s + v;
            }
            grads.bias[oc] = grads.bias[oc] + s;
        }
        // grad_weights += grad_out[Cout, HW] * cols^T[HW, kk]
        T::gemm(
            layer.out_channels,
            hw,
            kk,
            T::one(),
            g_item,
            hw as isize,
            1,
            cols,
            1,
            hw as isize,
            T::one(),
            &mut grads.weights,
            kk as isize,
            1,
        );
        // grad_cols = W^T[kk, Cout] * grad_out[Cout, HW]
        T::gemm(
            kk,
            layer.out_channels,
            hw,
            T::one(),
            &layer.weights,
            1,
            kk as isize,
            g_item,
            hw as isize,
            1,
            T::zero(),
            &mut grad_cols,
            hw as isize,
            1,
        );
        col2im_acc(&grad_cols, c, h, w, k, grad_input.item_mut(item));
    }
    Ok(grad_input)
}
