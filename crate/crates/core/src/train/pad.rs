//! Reflect padding so arbitrary frames fit the network's spatial divisor.

use crate::error::{Error, Result};
use crate::nn::tensor::{Scalar, Tensor4};

/// Smallest multiple of `divisor` that is >= `n`.
pub fn round_up(n: usize, divisor: usize) -> usize {
    n.div_ceil(divisor) * divisor
}

/// Reflect-pad a single-channel image on the bottom and right edges
/// (mirroring without repeating the border sample). The padding amount
/// must be smaller than the image, which holds for any frame of at least
/// `divisor` rows and columns.
pub fn reflect_pad<T: Scalar>(
    data: &[T],
    rows: usize,
    cols: usize,
    out_rows: usize,
    out_cols: usize,
) -> Result<Vec<T>> {
    if data.len() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "reflect_pad: {} samples for {rows}x{cols}",
            data.len()
        )));
    }
    if out_rows < rows || out_cols < cols {
        return Err(Error::InvalidArgument("reflect_pad cannot shrink".into()));
    }
    if out_rows - rows >= rows || out_cols - cols >= cols {
        return Err(Error::InvalidArgument(format!(
            "reflect_pad: padding {rows}x{cols} to {out_rows}x{out_cols} \
             exceeds the mirror range"
        )));
    }
    let reflect = |i: usize, n: usize| if i < n { i } else { 2 * n - 2 - i };
    let mut out = vec![T::zero(); out_rows * out_cols];
    for r in 0..out_rows {
        let sr = reflect(r, rows);
        for c in 0..out_cols {
            out[r * out_cols + c] = data[sr * cols + reflect(c, cols)];
        }
    }
    Ok(out)
}

/// Copy the top-left `rows x cols` region out of a padded (1-channel) item.
pub fn crop<T: Scalar>(
    tensor: &Tensor4<T>,
    item: usize,
    rows: usize,
    cols: usize,
) -> Vec<T> {
    let (_, _, _, w) = tensor.shape();
    let src = tensor.item(item);
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        out.extend_from_slice(&src[r * w..r * w + cols]);
    }
    out
}
