//! Frame averaging and the per-depth SNR profile.

use crate::error::{Error, Result};
use crate::rf_sim::frame::{FrameStack, RFFrame};

/// Pixelwise mean of the first `k` frames, averaged as-is (misaligned frames
/// are deliberately not registered first; that is the baseline's weakness).
pub fn average_frames(stack: &FrameStack, k: usize) -> Result<RFFrame> {
    if k < 1 {
        return Err(Error::InvalidArgument("average_frames: k must be >= 1".into()));
    }
    if k > stack.frames.len() {
        return Err(Error::InvalidArgument(format!(
            "average_frames: k = {k} exceeds stack size {}",
            stack.frames.len()
        )));
    }
    let mut out = stack.frames[0].clone();
    let mut acc: Vec<f64> = vec![0.0; out.samples.len()];
    for frame in &stack.frames[..k] {
        for (a, &v) in acc.iter_mut().zip(&frame.samples) {
            *a += v as f64;
        }
    }
    let inv = 1.0 / k as f64;
    for (o, a) in out.samples.iter_mut().zip(&acc) {
        *o = (a * inv) as f32;
    }
    out.noise_sigma = stack.frames[0].noise_sigma / (k as f32).sqrt();
    Ok(out)
}

/// Measurement-style ground truth: mean of the first `k` aligned frames.
/// With the simulator, `stack.clean` exposes the exact clean frame for
/// oracle comparisons instead.
pub fn ground_truth_from_stack(stack: &FrameStack, k: usize) -> Result<RFFrame> {
    average_frames(stack, k)
}

/// Per-depth SNR of an aligned multi-frame stack, in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrProfile {
    pub depth_index: Vec<usize>,
    pub depth_mm: Vec<f64>,
    pub snr_db: Vec<f64>,
}

/// For each depth row: signal power is the mean over lines of the squared
/// ensemble-mean trace; noise power is the unbiased (n/(n-1)) mean squared
/// deviation of the frames from the ensemble mean. A noiseless row yields
/// the `+inf` sentinel.
pub fn snr_depth_profile(stack: &FrameStack) -> Result<SnrProfile> {
    if stack.frames.len() < 2 {
        return Err(Error::InvalidArgument(
            "snr_depth_profile needs an ensemble of >= 2 frames".into(),
        ));
    }
    stack.validate()?;
    let n = stack.frames.len();
    let rows = stack.frames[0].rows;
    let cols = stack.frames[0].cols;
    let first = &stack.frames[0];
    let mut depth_index = Vec::with_capacity(rows);
    let mut depth_mm = Vec::with_capacity(rows);
    let mut snr_db = Vec::with_capacity(rows);
    for row in 0..rows {
        let mut signal = 0.0f64;
        let mut noise = 0.0f64;
        for col in 0..cols {
            let mut mean = 0.0f64;
            for f in &stack.frames {
                mean += f.at(row, col) as f64;
            }
            mean /= n as f64;
            signal += mean * mean;
            for f in &stack.frames {
                let d = f.at(row, col) as f64 - mean;
                noise += d * d;
            }
        }
        signal /= cols as f64;
        // unbiased ensemble variance, averaged over lines
        noise /= (cols * (n - 1)) as f64;
        depth_index.push(row);
        let z = match &first.grid {
            Some(g) => g.depth(row),
            None => row as f64 * first.probe.sound_speed / (2.0 * first.probe.sampling_freq),
        };
        depth_mm.push(z * 1000.0);
        snr_db.push(if noise == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (signal / noise).log10()
        });
    }
    Ok(SnrProfile {
        depth_index,
        depth_mm,
        snr_db,
    })
}

/// Pearson correlation between two equal-length series. Helper for trend
/// assertions on SNR profiles.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}
