//! Image-quality metrics, SNR-vs-depth profiling, and the frame-averaging
//! baseline used for method comparison.

pub mod quality;
pub mod report;
pub mod snr;

pub use quality::{nrmse, psnr, ssim, SsimParams};
pub use report::{compare_methods, MetricReport, MetricRow};
pub use snr::{average_frames, ground_truth_from_stack, pearson, snr_depth_profile, SnrProfile};
