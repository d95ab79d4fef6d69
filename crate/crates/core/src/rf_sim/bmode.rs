//! Envelope detection and log compression.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::rf_sim::frame::{BModeImage, FrameKind, RFFrame};

/// Per-line envelope via the discrete Hilbert transform (magnitude of the
/// FFT-based analytic signal). Lines are the frame columns (depth traces).
pub fn envelope(frame: &RFFrame) -> Result<Vec<f64>> {
    frame.validate()?;
    if frame.rows == 0 || frame.cols == 0 {
        return Err(Error::InvalidArgument("empty frame".into()));
    }
    let n = frame.rows;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let mut env = vec![0.0f64; frame.rows * frame.cols];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for col in 0..frame.cols {
        for (row, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(frame.at(row, col) as f64, 0.0);
        }
        fft.process(&mut buf);
        // analytic signal: keep DC and Nyquist, double positive, zero negative
        let half = n / 2;
        for (k, b) in buf.iter_mut().enumerate() {
            if k == 0 || (n % 2 == 0 && k == half) {
                // unchanged
            } else if k < half || (n % 2 == 1 && k == half) {
                *b *= 2.0;
            } else {
                *b = Complex::new(0.0, 0.0);
            }
        }
        ifft.process(&mut buf);
        let scale = 1.0 / n as f64;
        for row in 0..n {
            env[row * frame.cols + col] = (buf[row] * scale).norm();
        }
    }
    Ok(env)
}

/// Convert a beamformed frame to a display image: envelope, normalization by
/// the envelope max, `20*log10`, clip to `[-dynamic_range_db, 0]`, and an
/// affine map to [0, 1]. An all-zero frame maps to an all-zero image.
pub fn to_bmode(frame: &RFFrame, dynamic_range_db: f64) -> Result<BModeImage> {
    if frame.kind != FrameKind::Beamformed {
        return Err(Error::InvalidArgument("to_bmode expects a beamformed frame".into()));
    }
    if dynamic_range_db <= 0.0 {
        return Err(Error::InvalidArgument("dynamic range must be positive".into()));
    }
    let env = envelope(frame)?;
    let max = env.iter().cloned().fold(0.0f64, f64::max);
    let pixels = if max == 0.0 {
        vec![0.0; env.len()]
    } else {
        env.iter()
            .map(|&e| {
                let db = if e > 0.0 {
                    (20.0 * (e / max).log10()).max(-dynamic_range_db)
                } else {
                    -dynamic_range_db
                };
                db / dynamic_range_db + 1.0
            })
            .collect()
    };
    Ok(BModeImage {
        pixels,
        rows: frame.rows,
        cols: frame.cols,
        dynamic_range_db,
    })
}
