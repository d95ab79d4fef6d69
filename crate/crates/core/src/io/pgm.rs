//! B-mode exports: 16-bit binary PGM (P5) and CSV.

use std::fs;
use std::path::Path;

use crate::error::Result;
use crate::rf_sim::frame::BModeImage;

/// Write a [0, 1] image as a P5 PGM with maxval 65535 (big-endian samples,
/// per the PGM specification).
pub fn write_pgm16(path: &Path, image: &BModeImage) -> Result<()> {
    let mut out = format!("P5\n{} {}\n65535\n", image.cols, image.rows).into_bytes();
    out.reserve(image.pixels.len() * 2);
    for &v in &image.pixels {
        let q = (v.clamp(0.0, 1.0) * 65535.0).round() as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write an image as CSV, one row per image row.
pub fn write_csv(path: &Path, image: &BModeImage) -> Result<()> {
    let mut out = String::new();
    for row in 0..image.rows {
        let line: Vec<String> = (0..image.cols)
            .map(|col| format!("{:.6}", image.at(row, col)))
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}
