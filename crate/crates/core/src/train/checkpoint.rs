//! In-memory training checkpoint: everything needed to resume or denoise.

use crate::nn::adamw::OptimizerState;
use crate::nn::unet::ModelParams;
use crate::rf_sim::frame::FrameKind;
use crate::train::normalize::NormalizationMode;

/// Model weights, optimizer state, and the provenance needed to apply the
/// model consistently at inference time.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    /// Epoch index (0-based) this snapshot was taken after.
    pub epoch: usize,
    pub params: ModelParams<f32>,
    pub optimizer: OptimizerState<f32>,
    pub validation_loss: f64,
    /// Seed the training run was launched with.
    pub seed: u64,
    /// Normalization the training data went through; inference repeats it.
    pub normalization: NormalizationMode,
    /// Frame kind the model was trained on.
    pub frame_kind: FrameKind,
}
