//! Pooling, shuffling, and splitting Noise2Noise pairs across media.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rf_sim::frame::FrameStack;
use crate::train::normalize::{normalize_rf, NormalizationMode};
use crate::train::pairs::{enumerate_pairs, PairMode};

/// Optimizer and loop settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub epochs: usize,
    pub lr: f64,
    pub lr_schedule: LrSchedule,
    pub weight_decay: f64,
    pub seed: u64,
    pub pair_mode: PairMode,
    pub normalization: NormalizationMode,
    /// Fraction of pairs used for training; the rest validate.
    pub split_fraction: f64,
    pub split_mode: SplitMode,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 8,
            epochs: 100,
            lr: 1e-3,
            lr_schedule: LrSchedule::Constant,
            weight_decay: 1e-2,
            seed: 0,
            pair_mode: PairMode::Ordered,
            normalization: NormalizationMode::GlobalMaxAbs,
            split_fraction: 0.9,
            split_mode: SplitMode::ByPair,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch_size must be >= 1".into()));
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(Error::InvalidArgument(
                "split_fraction must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    /// Learning rate in effect for a given epoch.
    pub fn lr_at(&self, epoch: usize) -> f64 {
        match self.lr_schedule {
            LrSchedule::Constant => self.lr,
            LrSchedule::Cosine => {
                let t = epoch as f64 / self.epochs.max(1) as f64;
                self.lr * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
            }
        }
    }
}

/// Per-epoch learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrSchedule {
    /// `lr` for every epoch.
    Constant,
    /// Half-cosine decay from `lr` toward zero across the configured epochs;
    /// lowers the optimizer's stationary noise floor late in training.
    Cosine,
}

/// Pair split granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Shuffle and split the pooled pair list (mirrors the 90/10 pair split).
    ByPair,
    /// Hold out whole media for validation.
    ByMedium,
}

/// `floor(fraction * n)`, nudged so that exactly representable products like
/// 0.1 * 1350 do not land just below the integer they denote.
fn floor_fraction(fraction: f64, n: usize) -> usize {
    (fraction * n as f64 + 1e-9).floor() as usize
}

/// A pair resolved to a stack index in the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DatasetPair {
    pub stack: usize,
    pub input_frame: usize,
    pub target_frame: usize,
}

/// Normalized stacks plus the train/validation pair split.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub stacks: Vec<FrameStack>,
    /// Normalization scale divided out of each stack.
    pub scales: Vec<f64>,
    pub train: Vec<DatasetPair>,
    pub validation: Vec<DatasetPair>,
}

/// Build the training dataset: normalize each stack, enumerate pairs, pool
/// across media, shuffle with the config seed, and split. The split is by
/// pair unless `split_mode` says otherwise; validation gets
/// `floor((1 - split_fraction) * total)` pairs and training keeps at least
/// one pair.
pub fn build_dataset(stacks: &[FrameStack], config: &TrainConfig) -> Result<Dataset> {
    config.validate()?;
    if stacks.is_empty() {
        return Err(Error::InvalidArgument("no stacks provided".into()));
    }
    let mut normalized = Vec::with_capacity(stacks.len());
    let mut scales = Vec::with_capacity(stacks.len());
    for stack in stacks {
        let (s, scale) = normalize_rf(stack, config.normalization)?;
        normalized.push(s);
        scales.push(scale);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (train, validation) = match config.split_mode {
        SplitMode::ByPair => {
            let mut pool = Vec::new();
            for (si, stack) in normalized.iter().enumerate() {
                for (i, j) in enumerate_pairs(stack.len(), config.pair_mode)? {
                    pool.push(DatasetPair {
                        stack: si,
                        input_frame: i,
                        target_frame: j,
                    });
                }
            }
            pool.shuffle(&mut rng);
            let val_count = floor_fraction(1.0 - config.split_fraction, pool.len());
            let val_count = val_count.min(pool.len() - 1); // keep >= 1 train pair
            let validation = pool.split_off(pool.len() - val_count);
            (pool, validation)
        }
        SplitMode::ByMedium => {
            let mut order: Vec<usize> = (0..normalized.len()).collect();
            order.shuffle(&mut rng);
            let val_media =
                floor_fraction(1.0 - config.split_fraction, order.len()).min(order.len() - 1);
            let val_set: std::collections::HashSet<usize> =
                order[order.len() - val_media..].iter().cloned().collect();
            let mut train = Vec::new();
            let mut validation = Vec::new();
            for (si, stack) in normalized.iter().enumerate() {
                for (i, j) in enumerate_pairs(stack.len(), config.pair_mode)? {
                    let pair = DatasetPair {
                        stack: si,
                        input_frame: i,
                        target_frame: j,
                    };
                    if val_set.contains(&si) {
                        validation.push(pair);
                    } else {
                        train.push(pair);
                    }
                }
            }
            (train, validation)
        }
    };
    Ok(Dataset {
        stacks: normalized,
        scales,
        train,
        validation,
    })
}
