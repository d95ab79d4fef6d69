//! Noisy-input / noisy-target pair enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether a frame pair is used in one direction or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairMode {
    /// `n(n-1)/2` pairs with `input < target`.
    Unordered,
    /// `n(n-1)` pairs, both directions.
    Ordered,
}

/// One training pair within a stack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairIndex {
    pub medium_id: String,
    pub input_frame: usize,
    pub target_frame: usize,
}

/// Enumerate all distinct pairs of `n` frames in deterministic order.
pub fn enumerate_pairs(n: usize, mode: PairMode) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "pair enumeration needs n >= 2, got {n}"
        )));
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
            if mode == PairMode::Ordered {
                pairs.push((j, i));
            }
        }
    }
    Ok(pairs)
}
