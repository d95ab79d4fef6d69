//! The training loop: batched AdamW over Noise2Noise pairs with per-epoch
//! validation and best-checkpoint selection.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::checkpoint::save_checkpoint;
use crate::nn::adamw::{adamw_step, AdamWConfig, OptimizerState};
use crate::nn::ops::mse_loss;
use crate::nn::tensor::Tensor4;
use crate::nn::unet::{ModelGrads, ModelParams, UNetConfig};
use crate::rf_sim::frame::FrameStack;
use crate::train::checkpoint::Checkpoint;
use crate::train::dataset::{build_dataset, Dataset, DatasetPair, TrainConfig};
use crate::train::pad::{reflect_pad, round_up};

/// Per-epoch losses and wall time.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub seconds: f64,
}

/// Loss history for a whole run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochRecord>,
}

impl TrainLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss,seconds\n");
        for r in &self.epochs {
            out.push_str(&format!(
                "{},{},{},{:.3}\n",
                r.epoch, r.train_loss, r.val_loss, r.seconds
            ));
        }
        out
    }
}

/// Assemble a (batch, 1, H, W) input/target tensor pair, reflect-padding each
/// frame to the network's spatial divisor.
fn batch_tensors(
    dataset: &Dataset,
    pairs: &[DatasetPair],
    pad_rows: usize,
    pad_cols: usize,
) -> Result<(Tensor4<f32>, Tensor4<f32>)> {
    let b = pairs.len();
    let mut input = Tensor4::<f32>::zeros(b, 1, pad_rows, pad_cols);
    let mut target = Tensor4::<f32>::zeros(b, 1, pad_rows, pad_cols);
    for (i, pair) in pairs.iter().enumerate() {
        let stack = &dataset.stacks[pair.stack];
        let fi = &stack.frames[pair.input_frame];
        let ft = &stack.frames[pair.target_frame];
        input.item_mut(i).copy_from_slice(&reflect_pad(
            &fi.samples,
            fi.rows,
            fi.cols,
            pad_rows,
            pad_cols,
        )?);
        target.item_mut(i).copy_from_slice(&reflect_pad(
            &ft.samples,
            ft.rows,
            ft.cols,
            pad_rows,
            pad_cols,
        )?);
    }
    Ok((input, target))
}

fn mean_loss_over(
    model: &ModelParams<f32>,
    dataset: &Dataset,
    pairs: &[DatasetPair],
    batch_size: usize,
    pad_rows: usize,
    pad_cols: usize,
) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for chunk in pairs.chunks(batch_size) {
        let (input, target) = batch_tensors(dataset, chunk, pad_rows, pad_cols)?;
        let pred = model.forward(&input)?;
        let (loss, _) = mse_loss(&pred, &target)?;
        total += loss as f64 * chunk.len() as f64;
        count += chunk.len();
    }
    Ok(total / count as f64)
}

/// Train a fresh model on `stacks`. Returns the best checkpoint (lowest
/// validation loss, earliest epoch on ties) and the loss history.
///
/// When validation is empty the training loss stands in for selection. With
/// `checkpoint_dir` set, `latest.n2n` is rewritten every epoch and `best.n2n`
/// whenever the selection improves. Epoch shuffling uses `seed ^ epoch` so a
/// given run is reproducible sample for sample.
pub fn train(
    unet: UNetConfig,
    stacks: &[FrameStack],
    config: &TrainConfig,
    checkpoint_dir: Option<&Path>,
) -> Result<(Checkpoint, TrainLog)> {
    unet.validate()?;
    let dataset = build_dataset(stacks, config)?;
    let frame0 = &dataset.stacks[0].frames[0];
    let frame_kind = frame0.kind;
    let div = unet.spatial_divisor();
    let pad_rows = round_up(frame0.rows, div);
    let pad_cols = round_up(frame0.cols, div);
    for stack in &dataset.stacks {
        for f in &stack.frames {
            if f.rows != frame0.rows || f.cols != frame0.cols {
                return Err(Error::ShapeMismatch(format!(
                    "train: mixed frame shapes {}x{} vs {}x{}",
                    f.rows, f.cols, frame0.rows, frame0.cols
                )));
            }
        }
    }

    let mut model = ModelParams::<f32>::init(unet, config.seed)?;
    let mut opt = OptimizerState::new(
        AdamWConfig {
            lr: config.lr,
            weight_decay: config.weight_decay,
            ..Default::default()
        },
        &model,
    );
    let snapshot = |model: &ModelParams<f32>, opt: &OptimizerState<f32>, epoch, val| Checkpoint {
        epoch,
        params: model.clone(),
        optimizer: opt.clone(),
        validation_loss: val,
        seed: config.seed,
        normalization: config.normalization,
        frame_kind,
    };

    if config.epochs == 0 {
        return Ok((snapshot(&model, &opt, 0, f64::INFINITY), TrainLog::default()));
    }

    let mut order = dataset.train.clone();
    let mut log = TrainLog::default();
    let mut best: Option<Checkpoint> = None;
    for epoch in 0..config.epochs {
        let started = Instant::now();
        opt.config.lr = config.lr_at(epoch);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ epoch as u64);
        order.shuffle(&mut rng);
        let mut train_total = 0.0;
        for (batch_idx, chunk) in order.chunks(config.batch_size).enumerate() {
            let (input, target) = batch_tensors(&dataset, chunk, pad_rows, pad_cols)?;
            let (pred, cache) = model.forward_cached(&input)?;
            let (loss, grad_pred) = mse_loss(&pred, &target)?;
            if !loss.is_finite() {
                return Err(Error::Numerical(format!(
                    "train: non-finite loss at epoch {epoch}, batch {batch_idx}"
                )));
            }
            let mut grads = ModelGrads::zeros_like(&model);
            model.backward(&cache, &grad_pred, &mut grads)?;
            adamw_step(&mut opt, &mut model, &grads)?;
            train_total += loss as f64 * chunk.len() as f64;
        }
        let train_loss = train_total / order.len() as f64;
        let val_loss = if dataset.validation.is_empty() {
            train_loss
        } else {
            mean_loss_over(
                &model,
                &dataset,
                &dataset.validation,
                config.batch_size,
                pad_rows,
                pad_cols,
            )?
        };
        log.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            seconds: started.elapsed().as_secs_f64(),
        });
        let improved = best
            .as_ref()
            .map_or(true, |b| val_loss < b.validation_loss);
        if improved {
            best = Some(snapshot(&model, &opt, epoch, val_loss));
        }
        if let Some(dir) = checkpoint_dir {
            save_checkpoint(
                &dir.join("latest.n2n"),
                &snapshot(&model, &opt, epoch, val_loss),
            )?;
            if improved {
                save_checkpoint(&dir.join("best.n2n"), best.as_ref().unwrap())?;
            }
        }
    }
    Ok((best.expect("epochs >= 1 yields a checkpoint"), log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf_sim::frame::{FrameKind, RFFrame};
    use crate::rf_sim::probe::ProbeConfig;
    use crate::rf_sim::simulate::add_gaussian_noise;
    use crate::train::pairs::PairMode;

    fn noisy_stacks(media: usize, frames: usize, rows: usize, cols: usize) -> Vec<FrameStack> {
        let probe = ProbeConfig::default();
        (0..media)
            .map(|m| {
                let mut clean = RFFrame::zeros(rows, cols, FrameKind::Beamformed, probe);
                for (i, v) in clean.samples.iter_mut().enumerate() {
                    *v = ((i + m) as f32 * 0.37).sin();
                }
                FrameStack {
                    frames: (0..frames)
                        .map(|i| {
                            add_gaussian_noise(&clean, 0.5, (m * 1000 + i) as u64).unwrap()
                        })
                        .collect(),
                    clean: Some(clean),
                    medium_id: format!("m{m}"),
                }
            })
            .collect()
    }

    fn tiny_unet() -> UNetConfig {
        UNetConfig {
            base_channels: 2,
            depth: 2,
            ..Default::default()
        }
    }

    fn tiny_config(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            batch_size: 4,
            pair_mode: PairMode::Unordered,
            ..Default::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initial_params() {
        let stacks = noisy_stacks(1, 3, 8, 8);
        let (ckpt, log) = train(tiny_unet(), &stacks, &tiny_config(0), None).unwrap();
        assert!(log.epochs.is_empty());
        let fresh = ModelParams::<f32>::init(tiny_unet(), 0).unwrap();
        assert_eq!(ckpt.params, fresh);
        assert_eq!(ckpt.optimizer.step, 0);
    }

    #[test]
    fn loss_drops_over_a_few_epochs() {
        let stacks = noisy_stacks(2, 4, 8, 8);
        let (_, log) = train(tiny_unet(), &stacks, &tiny_config(6), None).unwrap();
        let first = log.epochs.first().unwrap().train_loss;
        let last = log.epochs.last().unwrap().train_loss;
        assert!(
            last < first,
            "train loss did not drop: {first} -> {last}"
        );
    }

    #[test]
    fn best_checkpoint_has_minimum_validation_loss() {
        let stacks = noisy_stacks(3, 4, 8, 8);
        let (best, log) = train(tiny_unet(), &stacks, &tiny_config(5), None).unwrap();
        let min = log
            .epochs
            .iter()
            .map(|r| r.val_loss)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best.validation_loss, min);
        // earliest epoch achieving the minimum
        let first_min = log.epochs.iter().find(|r| r.val_loss == min).unwrap();
        assert_eq!(best.epoch, first_min.epoch);
    }

    #[test]
    fn reruns_are_identical() {
        let stacks = noisy_stacks(2, 3, 8, 8);
        let (a, la) = train(tiny_unet(), &stacks, &tiny_config(3), None).unwrap();
        let (b, lb) = train(tiny_unet(), &stacks, &tiny_config(3), None).unwrap();
        assert_eq!(a.params, b.params);
        // wall time differs; compare everything else
        let losses = |l: &TrainLog| {
            l.epochs
                .iter()
                .map(|r| (r.epoch, r.train_loss, r.val_loss))
                .collect::<Vec<_>>()
        };
        assert_eq!(losses(&la), losses(&lb));
    }

    #[test]
    fn checkpoint_files_written() {
        let dir = tempfile::tempdir().unwrap();
        let stacks = noisy_stacks(1, 3, 8, 8);
        let (best, _) = train(tiny_unet(), &stacks, &tiny_config(2), Some(dir.path())).unwrap();
        let loaded = crate::io::checkpoint::load_checkpoint(&dir.path().join("best.n2n")).unwrap();
        assert_eq!(loaded.params, best.params);
        assert!(dir.path().join("latest.n2n").exists());
    }

    #[test]
    fn non_square_frames_pad_and_train() {
        let stacks = noisy_stacks(1, 3, 10, 6);
        let (_, log) = train(tiny_unet(), &stacks, &tiny_config(1), None).unwrap();
        assert_eq!(log.epochs.len(), 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let stacks = noisy_stacks(1, 3, 8, 8);
        let (_, log) = train(tiny_unet(), &stacks, &tiny_config(2), None).unwrap();
        let csv = log.to_csv();
        assert!(csv.starts_with("epoch,train_loss,val_loss,seconds\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
