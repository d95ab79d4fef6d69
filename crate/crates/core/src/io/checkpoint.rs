//! Binary checkpoint files (`.n2n`).
//!
//! Layout: 8-byte magic `N2NUS001`, a little-endian u64 giving the length of
//! the JSON metadata block, the metadata itself, then three raw f32
//! little-endian sections in layer order (weights then bias per layer):
//! model parameters, optimizer first moments, optimizer second moments.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::adamw::{AdamWConfig, OptimizerState};
use crate::nn::unet::{ModelParams, UNetConfig};
use crate::rf_sim::frame::FrameKind;
use crate::train::checkpoint::Checkpoint;
use crate::train::normalize::NormalizationMode;

const MAGIC: &[u8; 8] = b"N2NUS001";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Metadata {
    version: u32,
    config: UNetConfig,
    epoch: usize,
    validation_loss: f64,
    seed: u64,
    adamw: AdamWConfig,
    step: u64,
    normalization: NormalizationMode,
    frame_kind: FrameKind,
}

fn write_f32_section(w: &mut impl Write, values: impl Iterator<Item = f32>) -> Result<()> {
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_f32_section(r: &mut impl Read, count: usize) -> Result<Vec<f32>> {
    let mut bytes = vec![0u8; count * 4];
    r.read_exact(&mut bytes)?;
    Ok(bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect())
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    let meta = Metadata {
        version: 1,
        config: ckpt.params.config,
        epoch: ckpt.epoch,
        validation_loss: ckpt.validation_loss,
        seed: ckpt.seed,
        adamw: ckpt.optimizer.config,
        step: ckpt.optimizer.step,
        normalization: ckpt.normalization,
        frame_kind: ckpt.frame_kind,
    };
    let json = serde_json::to_vec(&meta)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    for layer in &ckpt.params.layers {
        write_f32_section(&mut w, layer.weights.iter().chain(&layer.bias).copied())?;
    }
    for buf in ckpt.optimizer.m.iter().chain(&ckpt.optimizer.v) {
        write_f32_section(&mut w, buf.iter().copied())?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!(
            "{}: not a checkpoint file (bad magic)",
            path.display()
        )));
    }
    let mut len_bytes = [0u8; 8];
    r.read_exact(&mut len_bytes)?;
    let json_len = u64::from_le_bytes(len_bytes) as usize;
    let mut json = vec![0u8; json_len];
    r.read_exact(&mut json)?;
    let meta: Metadata = serde_json::from_slice(&json)?;
    if meta.version != 1 {
        return Err(Error::Format(format!(
            "unsupported checkpoint version {}",
            meta.version
        )));
    }
    let mut params = ModelParams::<f32>::zeros(meta.config)?;
    for layer in &mut params.layers {
        let n_w = layer.weights.len();
        let flat = read_f32_section(&mut r, n_w + layer.bias.len())?;
        layer.weights.copy_from_slice(&flat[..n_w]);
        layer.bias.copy_from_slice(&flat[n_w..]);
    }
    let mut optimizer = OptimizerState::new(meta.adamw, &params);
    optimizer.step = meta.step;
    for buf in optimizer.m.iter_mut().chain(optimizer.v.iter_mut()) {
        *buf = read_f32_section(&mut r, buf.len())?;
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format(format!(
            "{}: trailing bytes after checkpoint payload",
            path.display()
        )));
    }
    Ok(Checkpoint {
        epoch: meta.epoch,
        params,
        optimizer,
        validation_loss: meta.validation_loss,
        seed: meta.seed,
        normalization: meta.normalization,
        frame_kind: meta.frame_kind,
    })
}
