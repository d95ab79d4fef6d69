//! Stack normalization so network inputs and targets stay commensurate.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rf_sim::frame::FrameStack;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    /// Divide every frame of a stack by the max |value| over the stack.
    GlobalMaxAbs,
    None,
}

/// Normalize a stack and return the scale that was divided out (1 for an
/// all-zero stack or mode `None`). The clean frame shares the scale so
/// oracle comparisons stay in the same units.
pub fn normalize_rf(stack: &FrameStack, mode: NormalizationMode) -> Result<(FrameStack, f64)> {
    stack.validate()?;
    if mode == NormalizationMode::None {
        return Ok((stack.clone(), 1.0));
    }
    let mut max_abs = 0.0f32;
    for frame in &stack.frames {
        for &v in &frame.samples {
            max_abs = max_abs.max(v.abs());
        }
    }
    if max_abs == 0.0 {
        return Ok((stack.clone(), 1.0));
    }
    let mut out = stack.clone();
    let inv = 1.0 / max_abs;
    for frame in &mut out.frames {
        for v in &mut frame.samples {
            *v *= inv;
        }
        frame.noise_sigma *= inv;
    }
    if let Some(clean) = &mut out.clean {
        for v in &mut clean.samples {
            *v *= inv;
        }
    }
    Ok((out, max_abs as f64))
}
