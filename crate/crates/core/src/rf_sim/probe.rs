//! Transducer geometry, the depth-attenuation model, and inter-frame motion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear-array transducer geometry and acquisition constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    /// Number of array elements.
    pub num_elements: usize,
    /// Element spacing in meters.
    pub pitch: f64,
    /// Carrier frequency in Hz.
    pub center_freq: f64,
    /// Sampling frequency in Hz.
    pub sampling_freq: f64,
    /// Speed of sound in m/s.
    pub sound_speed: f64,
    /// Axial samples per channel trace.
    pub num_samples: usize,
    /// Cycles in the Gaussian-modulated excitation pulse.
    pub pulse_cycles: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            num_elements: 64,
            pitch: 0.3e-3,
            center_freq: 7.6e6,
            sampling_freq: 31.25e6,
            sound_speed: 1540.0,
            num_samples: 1024,
            pulse_cycles: 3,
        }
    }
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sampling_freq <= 2.0 * self.center_freq {
            return Err(Error::InvalidArgument(format!(
                "sampling_freq {} must exceed 2x center_freq {}",
                self.sampling_freq, self.center_freq
            )));
        }
        if self.num_elements < 2 {
            return Err(Error::InvalidArgument("num_elements must be >= 2".into()));
        }
        if self.pitch <= 0.0 || self.sound_speed <= 0.0 {
            return Err(Error::InvalidArgument(
                "pitch and sound_speed must be positive".into(),
            ));
        }
        if self.num_samples == 0 || self.pulse_cycles == 0 {
            return Err(Error::InvalidArgument(
                "num_samples and pulse_cycles must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Lateral position of element `e`, centered on the array midpoint.
    pub fn element_x(&self, e: usize) -> f64 {
        (e as f64 - (self.num_elements as f64 - 1.0) / 2.0) * self.pitch
    }

    /// Deepest round-trip range covered by the channel traces.
    pub fn max_depth(&self) -> f64 {
        self.num_samples as f64 * self.sound_speed / (2.0 * self.sampling_freq)
    }

    /// Carrier wavelength.
    pub fn wavelength(&self) -> f64 {
        self.sound_speed / self.center_freq
    }

    /// Half-width of the transducer aperture.
    pub fn half_aperture(&self) -> f64 {
        (self.num_elements as f64 - 1.0) / 2.0 * self.pitch
    }
}

/// 0.5 dB/(cm·MHz) soft-tissue attenuation slope in Np/(m·Hz).
pub const ALPHA0_SOFT_TISSUE: f64 = 0.5 * 100.0 / (8.685_889_638_065_035 * 1e6);

/// Homogeneous linear-with-frequency attenuation:
/// `gain(f, z) = exp(-prefactor * alpha0 * f * z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttenuationModel {
    /// Attenuation slope in Np/(m·Hz).
    pub alpha0: f64,
    /// Exponent prefactor (kept configurable; default 4).
    pub prefactor: f64,
}

impl Default for AttenuationModel {
    fn default() -> Self {
        AttenuationModel {
            alpha0: ALPHA0_SOFT_TISSUE,
            prefactor: 4.0,
        }
    }
}

impl AttenuationModel {
    pub fn validate(&self) -> Result<()> {
        if self.alpha0 < 0.0 {
            return Err(Error::InvalidArgument("alpha0 must be >= 0".into()));
        }
        if self.prefactor <= 0.0 {
            return Err(Error::InvalidArgument("prefactor must be > 0".into()));
        }
        Ok(())
    }

    /// One-way amplitude gain for frequency `f` at depth `z`.
    pub fn attenuation_gain(&self, f: f64, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::InvalidArgument(format!("depth z must be >= 0, got {z}")));
        }
        if f <= 0.0 {
            return Err(Error::InvalidArgument(format!("frequency must be > 0, got {f}")));
        }
        self.validate()?;
        Ok((-self.prefactor * self.alpha0 * f * z).exp())
    }
}

/// Rigid per-frame motion: each frame after the first is shifted by a
/// Gaussian draw in depth and laterally (hand-tremor stand-in).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionModel {
    pub tremor_sigma_z: f64,
    pub tremor_sigma_x: f64,
    pub seed: u64,
}

impl MotionModel {
    /// No motion: every frame perfectly aligned.
    pub fn none() -> Self {
        MotionModel {
            tremor_sigma_z: 0.0,
            tremor_sigma_x: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tremor_sigma_z < 0.0 || self.tremor_sigma_x < 0.0 {
            return Err(Error::InvalidArgument("tremor sigmas must be >= 0".into()));
        }
        Ok(())
    }

    /// Rigid shift `(dz, dx)` for a frame, given the per-frame RNG stream.
    /// Frame 0 is the unshifted reference by convention; callers enforce it.
    pub fn draw_shift(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let dz = if self.tremor_sigma_z > 0.0 {
            Normal::new(0.0, self.tremor_sigma_z).unwrap().sample(rng)
        } else {
            0.0
        };
        let dx = if self.tremor_sigma_x > 0.0 {
            Normal::new(0.0, self.tremor_sigma_x).unwrap().sample(rng)
        } else {
            0.0
        };
        (dz, dx)
    }

    /// Standalone shift for frame `index` using the model's own seed.
    pub fn shift_for_frame(&self, index: usize) -> (f64, f64) {
        if index == 0 {
            return (0.0, 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ index as u64);
        self.draw_shift(&mut rng)
    }
}
