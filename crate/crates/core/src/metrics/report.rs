//! Table-style method comparison on B-mode images.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::quality::{nrmse, psnr, ssim, SsimParams};
use crate::rf_sim::frame::BModeImage;

/// One method's metrics against the clean reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: String,
    pub psnr_db: f64,
    pub nrmse: f64,
    pub ssim: f64,
}

/// Per-method comparison in the fixed row order
/// noisy input / averaging frames / proposed method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub dataset_id: String,
    pub ground_truth_note: String,
    pub rows: Vec<MetricRow>,
}

impl MetricReport {
    /// CSV rendering; infinite PSNR is written as the documented "inf"
    /// sentinel.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,psnr_db,nrmse,ssim\n");
        for row in &self.rows {
            let psnr = if row.psnr_db.is_infinite() {
                "inf".to_string()
            } else {
                format!("{:.4}", row.psnr_db)
            };
            out.push_str(&format!(
                "{},{},{:.6},{:.4}\n",
                row.method, psnr, row.nrmse, row.ssim
            ));
        }
        out
    }

    /// Aligned-column human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "dataset: {}\nground truth: {}\n{:<18} {:>9} {:>9} {:>7}\n",
            self.dataset_id, self.ground_truth_note, "method", "PSNR(dB)", "NRMSE", "SSIM"
        );
        for row in &self.rows {
            let psnr = if row.psnr_db.is_infinite() {
                "inf".to_string()
            } else {
                format!("{:.2}", row.psnr_db)
            };
            out.push_str(&format!(
                "{:<18} {:>9} {:>9.4} {:>7.3}\n",
                row.method, psnr, row.nrmse, row.ssim
            ));
        }
        out
    }
}

fn metric_row(method: &str, clean: &BModeImage, test: &BModeImage) -> Result<MetricRow> {
    Ok(MetricRow {
        method: method.to_string(),
        psnr_db: psnr(&clean.pixels, &test.pixels, 1.0)?,
        nrmse: nrmse(&clean.pixels, &test.pixels)?,
        ssim: ssim(
            &clean.pixels,
            &test.pixels,
            clean.rows,
            clean.cols,
            &SsimParams::default(),
        )?,
    })
}

/// Compare the three standard methods against the clean reference. All
/// images must be co-registered B-mode images of the same shape.
pub fn compare_methods(
    dataset_id: &str,
    clean: &BModeImage,
    noisy: &BModeImage,
    averaged: &BModeImage,
    denoised: &BModeImage,
) -> Result<MetricReport> {
    for img in [noisy, averaged, denoised] {
        if img.rows != clean.rows || img.cols != clean.cols {
            return Err(Error::ShapeMismatch(
                "compare_methods: images must share the clean reference's shape".into(),
            ));
        }
    }
    Ok(MetricReport {
        dataset_id: dataset_id.to_string(),
        ground_truth_note: "simulator clean frame".to_string(),
        rows: vec![
            metric_row("noisy input", clean, noisy)?,
            metric_row("averaging frames", clean, averaged)?,
            metric_row("proposed method", clean, denoised)?,
        ],
    })
}
