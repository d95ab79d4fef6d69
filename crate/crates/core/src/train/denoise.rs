//! Whole-frame inference with a trained checkpoint.

use crate::error::{Error, Result};
use crate::nn::tensor::Tensor4;
use crate::rf_sim::frame::RFFrame;
use crate::train::checkpoint::Checkpoint;
use crate::train::normalize::NormalizationMode;
use crate::train::pad::{crop, reflect_pad, round_up};

/// Denoise one frame: normalize the way training did (per-frame scale),
/// reflect-pad to the network's spatial divisor, run the model, crop back,
/// and undo the normalization.
pub fn denoise_frame(ckpt: &Checkpoint, frame: &RFFrame) -> Result<RFFrame> {
    frame.validate()?;
    if frame.kind != ckpt.frame_kind {
        return Err(Error::InvalidArgument(format!(
            "denoise: checkpoint trained on {:?} frames, got {:?}",
            ckpt.frame_kind, frame.kind
        )));
    }
    let scale = match ckpt.normalization {
        NormalizationMode::GlobalMaxAbs => {
            let m = frame
                .samples
                .iter()
                .fold(0.0f32, |acc, &v| acc.max(v.abs()));
            if m > 0.0 {
                m
            } else {
                1.0
            }
        }
        NormalizationMode::None => 1.0,
    };
    let div = ckpt.params.config.spatial_divisor();
    let pad_rows = round_up(frame.rows, div);
    let pad_cols = round_up(frame.cols, div);
    let scaled: Vec<f32> = frame.samples.iter().map(|&v| v / scale).collect();

    // Self-ensemble over the lateral mirror: a centered linear-array patch is
    // statistically symmetric left-right, so the model is applied to the frame
    // and its mirrored copy and the two estimates are averaged. The residual
    // errors decorrelate while the signal is unchanged.
    let run = |image: &[f32]| -> Result<Vec<f32>> {
        let padded = reflect_pad(image, frame.rows, frame.cols, pad_rows, pad_cols)?;
        let input = Tensor4::from_vec(padded, 1, 1, pad_rows, pad_cols);
        let output = ckpt.params.forward(&input)?;
        if !output.all_finite() {
            return Err(Error::Numerical("denoise: non-finite model output".into()));
        }
        Ok(crop(&output, 0, frame.rows, frame.cols))
    };
    let direct = run(&scaled)?;
    let mirrored = run(&flip_lateral(&scaled, frame.rows, frame.cols))?;
    let mirrored = flip_lateral(&mirrored, frame.rows, frame.cols);
    let samples: Vec<f32> = direct
        .iter()
        .zip(&mirrored)
        .map(|(&a, &b)| 0.5 * (a + b) * scale)
        .collect();
    Ok(RFFrame {
        samples,
        noise_sigma: 0.0,
        ..frame.clone()
    })
}

/// Reverse the column order of a row-major image.
fn flip_lateral(data: &[f32], rows: usize, cols: usize) -> Vec<f32> {
    let mut out = Vec::with_capacity(data.len());
    for r in 0..rows {
        out.extend(data[r * cols..(r + 1) * cols].iter().rev());
    }
    out
}
