//! Point-scatterer pulse-echo simulation for a single 0-degree plane-wave
//! transmission, plus additive acquisition noise and stack generation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rf_sim::beamform::das_beamform;
use crate::rf_sim::frame::{BeamformGrid, FrameKind, FrameStack, RFFrame};
use crate::rf_sim::probe::{AttenuationModel, MotionModel, ProbeConfig};
use crate::rf_sim::scatterers::ScattererField;

/// Simulate noiseless channel data for one transmit.
///
/// For a scatterer at `(z', x')` and element at `x_e`, the plane wave reaches
/// the scatterer at `z'/c` and the echo returns after
/// `sqrt(z'^2 + (x'-x_e)^2)/c`. Each echo is the scatterer amplitude times
/// the carrier-frequency attenuation gain at `z'` times a Gaussian-windowed
/// cosine pulse spanning `pulse_cycles` cycles. `shift` is a rigid `(dz, dx)`
/// offset applied to the whole field; scatterers shifted out of range are
/// skipped (not an error).
pub fn simulate_channel_data(
    probe: &ProbeConfig,
    field: &ScattererField,
    atten: &AttenuationModel,
    shift: (f64, f64),
) -> Result<RFFrame> {
    probe.validate()?;
    field.validate()?;
    atten.validate()?;
    let max_depth = probe.max_depth();
    if field.extent.z_max > max_depth {
        return Err(Error::InvalidArgument(format!(
            "field depth {} exceeds imaging depth {max_depth}",
            field.extent.z_max
        )));
    }
    let (dz, dx) = shift;
    let c = probe.sound_speed;
    let fs = probe.sampling_freq;
    let fc = probe.center_freq;
    // pulse duration covering pulse_cycles carrier cycles; the Gaussian
    // window is ~0.01 at the truncation edge
    let duration = probe.pulse_cycles as f64 / fc;
    let half = duration / 2.0;
    let sigma = duration / 6.0;
    let mut acc = vec![0.0f64; probe.num_samples * probe.num_elements];
    for (&(z0, x0), &amp) in field.positions.iter().zip(&field.amplitudes) {
        if amp == 0.0 {
            continue;
        }
        let z = z0 + dz;
        let x = x0 + dx;
        if z <= 0.0 || z > max_depth {
            continue; // shifted out of the imaging range
        }
        let gain = atten.attenuation_gain(fc, z)?;
        let scaled = amp * gain;
        for e in 0..probe.num_elements {
            let xe = probe.element_x(e);
            let lat = x - xe;
            let tau = (z + (z * z + lat * lat).sqrt()) / c;
            let lo = ((tau - half) * fs).ceil().max(0.0) as usize;
            let hi = (((tau + half) * fs).floor() as usize).min(probe.num_samples - 1);
            for i in lo..=hi {
                let dt = i as f64 / fs - tau;
                let v = scaled
                    * (std::f64::consts::TAU * fc * dt).cos()
                    * (-(dt * dt) / (2.0 * sigma * sigma)).exp();
                acc[i * probe.num_elements + e] += v;
            }
        }
    }
    Ok(RFFrame {
        samples: acc.into_iter().map(|v| v as f32).collect(),
        rows: probe.num_samples,
        cols: probe.num_elements,
        kind: FrameKind::ChannelData,
        probe: *probe,
        noise_sigma: 0.0,
        grid: None,
    })
}

/// Add i.i.d. zero-mean Gaussian noise, deterministic per seed.
pub fn add_gaussian_noise(frame: &RFFrame, sigma: f64, seed: u64) -> Result<RFFrame> {
    if sigma < 0.0 {
        return Err(Error::InvalidArgument("noise sigma must be >= 0".into()));
    }
    let mut out = frame.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in &mut out.samples {
        *v += normal.sample(&mut rng) as f32;
    }
    // accumulated noise power if the frame was already noisy
    out.noise_sigma = ((frame.noise_sigma as f64).powi(2) + sigma * sigma).sqrt() as f32;
    Ok(out)
}

/// Simulate a full Noise2Noise frame stack.
///
/// Frame `i` draws a rigid shift from the motion model (frame 0 stays
/// unshifted), is simulated, beamformed, and gets independent noise. The
/// per-frame RNG stream is seeded with `seed ^ i`, so parallel and serial
/// generation agree. `clean` is the noiseless beamformed frame at zero shift.
#[allow(clippy::too_many_arguments)]
pub fn generate_frame_stack(
    probe: &ProbeConfig,
    field: &ScattererField,
    atten: &AttenuationModel,
    motion: &MotionModel,
    grid: &BeamformGrid,
    n: usize,
    noise_sigma: f64,
    seed: u64,
    medium_id: impl Into<String>,
) -> Result<FrameStack> {
    if n < 2 {
        return Err(Error::InvalidArgument("stack needs n >= 2 frames".into()));
    }
    motion.validate()?;
    let clean_channels = simulate_channel_data(probe, field, atten, (0.0, 0.0))?;
    let clean = das_beamform(&clean_channels, grid)?;
    let mut frames = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
        let shift = if i == 0 {
            (0.0, 0.0)
        } else {
            motion.draw_shift(&mut rng)
        };
        let beamformed = if shift == (0.0, 0.0) {
            clean.clone()
        } else {
            let channels = simulate_channel_data(probe, field, atten, shift)?;
            das_beamform(&channels, grid)?
        };
        let noise_seed = rng.next_u64();
        frames.push(add_gaussian_noise(&beamformed, noise_sigma, noise_seed)?);
    }
    let stack = FrameStack {
        frames,
        clean: Some(clean),
        medium_id: medium_id.into(),
    };
    stack.validate()?;
    Ok(stack)
}

use rand::RngCore;
