//! Noise2Noise training: pair enumeration, normalization, the training
//! loop, checkpoints, and whole-frame denoising.

pub mod checkpoint;
pub mod dataset;
pub mod denoise;
pub mod normalize;
pub mod pad;
pub mod pairs;
pub mod trainer;

pub use checkpoint::Checkpoint;
pub use dataset::{build_dataset, Dataset, DatasetPair, LrSchedule, SplitMode, TrainConfig};
pub use denoise::denoise_frame;
pub use normalize::{normalize_rf, NormalizationMode};
pub use pairs::{enumerate_pairs, PairIndex, PairMode};
pub use trainer::{train, EpochRecord, TrainLog};
