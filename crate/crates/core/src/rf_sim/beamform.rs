//! Delay-and-sum beamforming for a single 0-degree plane-wave transmit.

use crate::error::{Error, Result};
use crate::rf_sim::frame::{BeamformGrid, FrameKind, RFFrame};

/// Reconstruct a beamformed frame on `grid` from channel data.
///
/// For each pixel `(z, x)` the round-trip delay to element `e` at `x_e` is
/// `(z + sqrt(z^2 + (x - x_e)^2)) / c`; the channel trace is linearly
/// interpolated at that delay and summed over elements. Delays beyond the
/// trace length contribute zero. The whole map is linear in the channel data.
pub fn das_beamform(channel: &RFFrame, grid: &BeamformGrid) -> Result<RFFrame> {
    if channel.kind != FrameKind::ChannelData {
        return Err(Error::InvalidArgument(
            "das_beamform expects channel data".into(),
        ));
    }
    channel.validate()?;
    grid.validate()?;
    let probe = &channel.probe;
    if channel.rows != probe.num_samples || channel.cols != probe.num_elements {
        return Err(Error::ShapeMismatch(format!(
            "channel frame {}x{} does not match probe {}x{}",
            channel.rows, channel.cols, probe.num_samples, probe.num_elements
        )));
    }
    let c = probe.sound_speed;
    let fs = probe.sampling_freq;
    let n_samp = probe.num_samples;
    let element_x: Vec<f64> = (0..probe.num_elements).map(|e| probe.element_x(e)).collect();
    let mut out = vec![0.0f32; grid.rows * grid.cols];
    for j in 0..grid.rows {
        let z = grid.depth(j);
        for i in 0..grid.cols {
            let x = grid.lateral(i);
            let mut sum = 0.0f64;
            for (e, &xe) in element_x.iter().enumerate() {
                let lat = x - xe;
                let tau = (z + (z * z + lat * lat).sqrt()) / c;
                let s = tau * fs;
                let s0 = s.floor();
                let idx = s0 as usize;
                if s0 < 0.0 || idx + 1 >= n_samp {
                    continue;
                }
                let frac = s - s0;
                let a = channel.at(idx, e) as f64;
                let b = channel.at(idx + 1, e) as f64;
                sum += a + frac * (b - a);
            }
            out[j * grid.cols + i] = sum as f32;
        }
    }
    Ok(RFFrame {
        samples: out,
        rows: grid.rows,
        cols: grid.cols,
        kind: FrameKind::Beamformed,
        probe: *probe,
        noise_sigma: channel.noise_sigma,
        grid: Some(*grid),
    })
}
