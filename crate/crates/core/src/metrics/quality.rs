//! PSNR, NRMSE, and SSIM on equal-size grayscale images.
//!
//! Images are plain f64 slices in row-major order; B-mode images in [0, 1]
//! use `peak = 1` / `l = 1`.

use crate::error::{Error, Result};

fn check_pair(reference: &[f64], test: &[f64]) -> Result<()> {
    if reference.len() != test.len() || reference.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "metric inputs: {} vs {} elements",
            reference.len(),
            test.len()
        )));
    }
    Ok(())
}

fn mse(reference: &[f64], test: &[f64]) -> f64 {
    reference
        .iter()
        .zip(test)
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64
}

/// Peak signal-to-noise ratio in dB: `10*log10(peak^2 / MSE)`.
/// Identical images yield the `+inf` sentinel, not an error.
pub fn psnr(reference: &[f64], test: &[f64], peak: f64) -> Result<f64> {
    check_pair(reference, test)?;
    if peak <= 0.0 {
        return Err(Error::InvalidArgument("psnr: peak must be > 0".into()));
    }
    let mse = mse(reference, test);
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / mse).log10())
}

/// Root mean square error normalized by the reference value range.
pub fn nrmse(reference: &[f64], test: &[f64]) -> Result<f64> {
    check_pair(reference, test)?;
    let min = reference.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = reference.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range == 0.0 {
        return Err(Error::InvalidArgument(
            "nrmse: constant reference has no range".into(),
        ));
    }
    Ok(mse(reference, test).sqrt() / range)
}

/// SSIM window and stabilizer constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range of the pixel values.
    pub l: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        SsimParams {
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            l: 1.0,
        }
    }
}

impl SsimParams {
    fn kernel(&self) -> Vec<f64> {
        let n = self.window;
        let c = (n as f64 - 1.0) / 2.0;
        let mut k = Vec::with_capacity(n * n);
        for y in 0..n {
            for x in 0..n {
                let dy = y as f64 - c;
                let dx = x as f64 - c;
                k.push((-(dy * dy + dx * dx) / (2.0 * self.sigma * self.sigma)).exp());
            }
        }
        let sum: f64 = k.iter().sum();
        for v in &mut k {
            *v /= sum;
        }
        k
    }
}

/// Mean structural similarity over all fully-interior Gaussian windows.
pub fn ssim(
    reference: &[f64],
    test: &[f64],
    rows: usize,
    cols: usize,
    params: &SsimParams,
) -> Result<f64> {
    check_pair(reference, test)?;
    if reference.len() != rows * cols {
        return Err(Error::ShapeMismatch("ssim: dims do not match storage".into()));
    }
    let w = params.window;
    if rows < w || cols < w {
        return Err(Error::InvalidArgument(format!(
            "ssim: image {rows}x{cols} smaller than {w}x{w} window"
        )));
    }
    let c1 = (params.k1 * params.l).powi(2);
    let c2 = (params.k2 * params.l).powi(2);
    let kernel = params.kernel();
    let mut total = 0.0;
    let mut count = 0usize;
    for y0 in 0..=(rows - w) {
        for x0 in 0..=(cols - w) {
            let mut mu_x = 0.0;
            let mut mu_y = 0.0;
            let mut xx = 0.0;
            let mut yy = 0.0;
            let mut xy = 0.0;
            let mut ki = 0usize;
            for dy in 0..w {
                let base = (y0 + dy) * cols + x0;
                for dx in 0..w {
                    let kv = kernel[ki];
                    ki += 1;
                    let a = reference[base + dx];
                    let b = test[base + dx];
                    mu_x += kv * a;
                    mu_y += kv * b;
                    xx += kv * a * a;
                    yy += kv * b * b;
                    xy += kv * a * b;
                }
            }
            let var_x = xx - mu_x * mu_x;
            let var_y = yy - mu_y * mu_y;
            let cov = xy - mu_x * mu_y;
            let s = ((2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2))
                / ((mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2));
            total += s;
            count += 1;
        }
    }
    Ok(total / count as f64)
}
