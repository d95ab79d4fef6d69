//! The `.rfc` RF container: a JSON header at `<path>` plus raw frame data
//! at `<path>.bin` (32-bit little-endian floats, frame-major, row-major).
//! The simulator's clean reference frame, when present, is stored at
//! `<path>.clean` with the same per-frame layout (the "frame index -1"
//! convention).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rf_sim::frame::{BeamformGrid, FrameKind, FrameStack, RFFrame};
use crate::rf_sim::probe::ProbeConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfcHeader {
    pub version: u32,
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub frames: usize,
    pub probe: ProbeConfig,
    pub noise_sigma: f64,
    pub dtype: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<BeamformGrid>,
    #[serde(default)]
    pub medium_id: String,
    /// True when a `<path>.clean` file accompanies the container.
    #[serde(default)]
    pub has_clean: bool,
}

fn kind_str(kind: FrameKind) -> &'static str {
    match kind {
        FrameKind::ChannelData => "channel",
        FrameKind::Beamformed => "beamformed",
    }
}

fn kind_from_str(s: &str) -> Result<FrameKind> {
    match s {
        "channel" => Ok(FrameKind::ChannelData),
        "beamformed" => Ok(FrameKind::Beamformed),
        other => Err(Error::Format(format!("unknown frame kind {other:?}"))),
    }
}

fn frame_bytes(frame: &RFFrame) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(frame.samples.len() * 4);
    for v in &frame.samples {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}

fn samples_from_bytes(bytes: &[u8]) -> Result<Vec<f32>> {
    if bytes.len() % 4 != 0 {
        return Err(Error::Format("raw data length not a multiple of 4".into()));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

/// Write a frame stack. `path` is the JSON header file; data goes to
/// `<path>.bin`, the clean frame (if any) to `<path>.clean`.
pub fn write_stack(path: &Path, stack: &FrameStack) -> Result<()> {
    stack.validate()?;
    let first = &stack.frames[0];
    let header = RfcHeader {
        version: 1,
        kind: kind_str(first.kind).to_string(),
        rows: first.rows,
        cols: first.cols,
        frames: stack.frames.len(),
        probe: first.probe,
        noise_sigma: first.noise_sigma as f64,
        dtype: "f32le".to_string(),
        grid: first.grid,
        medium_id: stack.medium_id.clone(),
        has_clean: stack.clean.is_some(),
    };
    fs::write(path, serde_json::to_string_pretty(&header)?)?;
    let mut data = Vec::with_capacity(stack.frames.len() * first.samples.len() * 4);
    for frame in &stack.frames {
        data.extend_from_slice(&frame_bytes(frame));
    }
    fs::write(bin_path(path), data)?;
    if let Some(clean) = &stack.clean {
        fs::write(clean_path(path), frame_bytes(clean))?;
    }
    Ok(())
}

pub fn bin_path(header: &Path) -> std::path::PathBuf {
    let mut p = header.as_os_str().to_owned();
    p.push(".bin");
    p.into()
}

pub fn clean_path(header: &Path) -> std::path::PathBuf {
    let mut p = header.as_os_str().to_owned();
    p.push(".clean");
    p.into()
}

/// Write a single frame as a one-frame container (no clean companion).
pub fn write_frame(path: &Path, frame: &RFFrame) -> Result<()> {
    frame.validate()?;
    let header = RfcHeader {
        version: 1,
        kind: kind_str(frame.kind).to_string(),
        rows: frame.rows,
        cols: frame.cols,
        frames: 1,
        probe: frame.probe,
        noise_sigma: frame.noise_sigma as f64,
        dtype: "f32le".to_string(),
        grid: frame.grid,
        medium_id: String::new(),
        has_clean: false,
    };
    fs::write(path, serde_json::to_string_pretty(&header)?)?;
    fs::write(bin_path(path), frame_bytes(frame))?;
    Ok(())
}

/// Read a one-frame container written by [`write_frame`].
pub fn read_frame(path: &Path) -> Result<RFFrame> {
    let header: RfcHeader = serde_json::from_str(&fs::read_to_string(path)?)?;
    if header.frames != 1 {
        return Err(Error::Format(format!(
            "expected a single-frame container, header says {} frames",
            header.frames
        )));
    }
    let samples = samples_from_bytes(&fs::read(bin_path(path))?)?;
    if samples.len() != header.rows * header.cols {
        return Err(Error::Format("raw data size mismatch".into()));
    }
    let frame = RFFrame {
        samples,
        rows: header.rows,
        cols: header.cols,
        kind: kind_from_str(&header.kind)?,
        probe: header.probe,
        noise_sigma: header.noise_sigma as f32,
        grid: header.grid,
    };
    frame.validate()?;
    Ok(frame)
}

/// Read a stack written by [`write_stack`].
pub fn read_stack(path: &Path) -> Result<FrameStack> {
    let header: RfcHeader = serde_json::from_str(&fs::read_to_string(path)?)?;
    if header.version != 1 {
        return Err(Error::Format(format!("unsupported version {}", header.version)));
    }
    if header.dtype != "f32le" {
        return Err(Error::Format(format!("unsupported dtype {:?}", header.dtype)));
    }
    let kind = kind_from_str(&header.kind)?;
    let per_frame = header.rows * header.cols;
    let data = fs::read(bin_path(path))?;
    let samples = samples_from_bytes(&data)?;
    if samples.len() != per_frame * header.frames {
        return Err(Error::Format(format!(
            "raw data holds {} samples, header implies {}",
            samples.len(),
            per_frame * header.frames
        )));
    }
    let make_frame = |samples: Vec<f32>, noise_sigma: f32| RFFrame {
        samples,
        rows: header.rows,
        cols: header.cols,
        kind,
        probe: header.probe,
        noise_sigma,
        grid: header.grid,
    };
    let frames = samples
        .chunks_exact(per_frame)
        .map(|c| make_frame(c.to_vec(), header.noise_sigma as f32))
        .collect();
    let clean = if header.has_clean {
        let raw = fs::read(clean_path(path))?;
        let clean_samples = samples_from_bytes(&raw)?;
        if clean_samples.len() != per_frame {
            return Err(Error::Format("clean frame size mismatch".into()));
        }
        Some(make_frame(clean_samples, 0.0))
    } else {
        None
    };
    let stack = FrameStack {
        frames,
        clean,
        medium_id: header.medium_id,
    };
    stack.validate()?;
    Ok(stack)
}
