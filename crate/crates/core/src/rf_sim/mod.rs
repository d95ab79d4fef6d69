//! Synthetic plane-wave ultrasound: scatterer phantoms, pulse-echo channel
//! simulation with depth attenuation, delay-and-sum beamforming, additive
//! Gaussian acquisition noise, rigid inter-frame motion, and B-mode display
//! conversion.

pub mod beamform;
pub mod bmode;
pub mod frame;
pub mod probe;
pub mod scatterers;
pub mod simulate;

pub use beamform::das_beamform;
pub use bmode::{envelope, to_bmode};
pub use frame::{BModeImage, BeamformGrid, FrameKind, FrameStack, RFFrame};
pub use probe::{AttenuationModel, MotionModel, ProbeConfig, ALPHA0_SOFT_TISSUE};
pub use scatterers::{generate_scatterers, Extent, Inclusion, ScattererField};
pub use simulate::{add_gaussian_noise, generate_frame_stack, simulate_channel_data};
