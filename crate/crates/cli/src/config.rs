//! Run configuration: one JSON file per run, strictly parsed, with CLI
//! flags layered on top. Every command writes the fully resolved config
//! next to its outputs so a run can be reproduced from the artifacts alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use n2n_core::rf_sim::probe::{AttenuationModel, MotionModel, ProbeConfig};
use n2n_core::rf_sim::scatterers::{Extent, Inclusion};
use n2n_core::train::TrainConfig;
use n2n_core::nn::unet::UNetConfig;
use n2n_core::{Error, Result};

/// Top-level config. All randomness derives from `seed`; per-medium streams
/// are split with a fixed odd multiplier so media stay independent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denoise: Option<DenoiseConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_profile: Option<SnrProfileConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            output_dir: PathBuf::from("out"),
            simulation: None,
            training: None,
            evaluation: None,
            denoise: None,
            snr_profile: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }

    /// Write the resolved config next to the run's outputs.
    pub fn write_resolved(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join("resolved_config.json"), text)?;
        Ok(())
    }
}

/// Synthetic media generation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationConfig {
    pub media: usize,
    pub frames: usize,
    /// Beamforming grid size (depth pixels x lateral lines).
    pub rows: usize,
    pub cols: usize,
    pub noise_sigma: f64,
    /// Scatterers per square meter of extent.
    pub density: f64,
    /// Scatterer region; defaults to the probe's field of view.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extent: Option<Extent>,
    pub inclusions: Vec<Inclusion>,
    pub probe: ProbeConfig,
    pub attenuation: AttenuationModel,
    pub motion: MotionModel,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            media: 1,
            frames: 30,
            rows: 96,
            cols: 96,
            noise_sigma: 0.05,
            density: 2e6,
            extent: None,
            inclusions: Vec::new(),
            probe: ProbeConfig::default(),
            attenuation: AttenuationModel::default(),
            motion: MotionModel::none(),
        }
    }
}

impl SimulationConfig {
    /// Scatterer extent: configured, or the probe's full field of view.
    pub fn resolved_extent(&self) -> Extent {
        self.extent.unwrap_or(Extent {
            z_max: self.probe.max_depth(),
            x_min: -self.probe.half_aperture(),
            x_max: self.probe.half_aperture(),
        })
    }
}

/// Training run parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    /// `.rfc` header files to train on.
    pub data: Vec<PathBuf>,
    pub model: UNetConfig,
    pub train: TrainConfig,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            data: Vec::new(),
            model: UNetConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

/// Evaluation against a simulated stack's clean reference.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvaluationConfig {
    pub stack: PathBuf,
    pub checkpoint: PathBuf,
    /// Frames entering the averaging baseline; 0 means all frames.
    pub average_count: usize,
    /// Frame fed to the noisy/denoised methods.
    pub frame_index: usize,
    pub dynamic_range_db: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            stack: PathBuf::new(),
            checkpoint: PathBuf::new(),
            average_count: 0,
            frame_index: 0,
            dynamic_range_db: 60.0,
        }
    }
}

/// Single-frame inference parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DenoiseConfig {
    pub checkpoint: PathBuf,
    pub input: PathBuf,
    pub frame_index: usize,
    pub dynamic_range_db: f64,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        DenoiseConfig {
            checkpoint: PathBuf::new(),
            input: PathBuf::new(),
            frame_index: 0,
            dynamic_range_db: 60.0,
        }
    }
}

/// SNR-vs-depth profile parameters.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnrProfileConfig {
    pub input: PathBuf,
}
