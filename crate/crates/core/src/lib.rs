//! Self-supervised (Noise2Noise) denoising of ultrasound RF data at desk scale.
//!
//! The crate is organized in four layers:
//!
//! - [`rf_sim`]: synthetic plane-wave ultrasound simulation — point scatterers,
//!   depth-dependent attenuation, delay-and-sum beamforming, additive Gaussian
//!   noise, inter-frame motion, and B-mode conversion.
//! - [`nn`]: a minimal fixed-topology tensor engine and the light U-Net
//!   regressor (convolutions with hand-written backward passes, AdamW,
//!   gradient checking).
//! - [`train`]: Noise2Noise pair construction, train/validation splits, the
//!   training loop with best-validation checkpoint selection, and inference.
//! - [`metrics`]: PSNR / NRMSE / SSIM, SNR-vs-depth profiling, frame-averaging
//!   baselines, and method comparison reports.
//!
//! File formats (`.rfc` RF containers, `.n2n` checkpoints, PGM/CSV exports)
//! live in [`io`].

pub mod error;
pub mod io;
pub mod metrics;
pub mod nn;
pub mod rf_sim;
pub mod train;

pub use error::{Error, Result};
