//! RF frame, frame stack, and B-mode image containers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rf_sim::probe::ProbeConfig;

/// What an [`RFFrame`]'s samples represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    /// Per-element receive traces, (axial sample, element).
    ChannelData,
    /// Delay-and-sum output, (depth pixel, lateral line).
    Beamformed,
}

/// Pixel grid of a beamformed frame: `rows` depths spanning `z_min..z_max`,
/// `cols` lateral lines spanning `x_min..x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamformGrid {
    pub rows: usize,
    pub cols: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl BeamformGrid {
    /// Grid covering the probe's full imaging depth and aperture.
    pub fn full(probe: &ProbeConfig, rows: usize, cols: usize) -> Self {
        BeamformGrid {
            rows,
            cols,
            z_min: 0.0,
            z_max: probe.max_depth(),
            x_min: -probe.half_aperture(),
            x_max: probe.half_aperture(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidArgument("beamform grid must be non-empty".into()));
        }
        if self.z_max <= self.z_min || self.z_min < 0.0 {
            return Err(Error::InvalidArgument("invalid grid depth range".into()));
        }
        if self.x_max <= self.x_min {
            return Err(Error::InvalidArgument("invalid grid lateral range".into()));
        }
        Ok(())
    }

    /// Depth of pixel row `j` (cell-centered).
    pub fn depth(&self, j: usize) -> f64 {
        self.z_min + (j as f64 + 0.5) * (self.z_max - self.z_min) / self.rows as f64
    }

    /// Lateral position of pixel column `i` (cell-centered).
    pub fn lateral(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * (self.x_max - self.x_min) / self.cols as f64
    }
}

/// One RF frame: 2-D f32 samples in (row, column) order.
#[derive(Debug, Clone, PartialEq)]
pub struct RFFrame {
    pub samples: Vec<f32>,
    pub rows: usize,
    pub cols: usize,
    pub kind: FrameKind,
    pub probe: ProbeConfig,
    /// Standard deviation of added noise; 0 for a clean frame.
    pub noise_sigma: f32,
    /// Pixel geometry; present for beamformed frames.
    pub grid: Option<BeamformGrid>,
}

impl RFFrame {
    pub fn zeros(rows: usize, cols: usize, kind: FrameKind, probe: ProbeConfig) -> Self {
        RFFrame {
            samples: vec![0.0; rows * cols],
            rows,
            cols,
            kind,
            probe,
            noise_sigma: 0.0,
            grid: None,
        }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f32 {
        self.samples[row * self.cols + col]
    }

    #[inline]
    pub fn at_mut(&mut self, row: usize, col: usize) -> &mut f32 {
        &mut self.samples[row * self.cols + col]
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() != self.rows * self.cols {
            return Err(Error::ShapeMismatch(format!(
                "frame storage {} != {}x{}",
                self.samples.len(),
                self.rows,
                self.cols
            )));
        }
        if !self.samples.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical("frame contains non-finite samples".into()));
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &RFFrame) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.kind == other.kind
    }
}

/// `n` co-registered noisy frames of one medium, plus the simulator's exact
/// clean frame when available. The unit of Noise2Noise pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStack {
    pub frames: Vec<RFFrame>,
    pub clean: Option<RFFrame>,
    pub medium_id: String,
}

impl FrameStack {
    pub fn validate(&self) -> Result<()> {
        if self.frames.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "stack needs >= 2 frames for pairing, got {}",
                self.frames.len()
            )));
        }
        let first = &self.frames[0];
        for f in &self.frames {
            f.validate()?;
            if !f.same_shape(first) {
                return Err(Error::ShapeMismatch(
                    "frames in a stack must share shape and kind".into(),
                ));
            }
        }
        if let Some(c) = &self.clean {
            c.validate()?;
            if !c.same_shape(first) {
                return Err(Error::ShapeMismatch("clean frame shape differs".into()));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Log-compressed display image, pixels in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct BModeImage {
    pub pixels: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    /// 0 maps to -dynamic_range_db, 1 to 0 dB relative to the image max.
    pub dynamic_range_db: f64,
}

impl BModeImage {
    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }
}
