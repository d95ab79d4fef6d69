//! Subcommand implementations. Each command resolves its config block,
//! creates the output directory, writes the resolved config, and produces
//! its artifacts deterministically from the run seed.

use std::fs;
use std::path::Path;

use n2n_core::io;
use n2n_core::metrics::{average_frames, compare_methods, snr_depth_profile};
use n2n_core::rf_sim::bmode::to_bmode;
use n2n_core::rf_sim::frame::BeamformGrid;
use n2n_core::rf_sim::scatterers::generate_scatterers;
use n2n_core::rf_sim::simulate::generate_frame_stack;
use n2n_core::train::{denoise_frame, train};
use n2n_core::{Error, Result};

use crate::config::RunConfig;

/// Distinct, documented RNG streams per medium: golden-ratio increments of
/// the root seed keep stacks independent while staying reproducible.
fn medium_seed(root: u64, medium: usize) -> u64 {
    root.wrapping_add((medium as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn prepare_output(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.output_dir)?;
    config.write_resolved(&config.output_dir)
}

pub fn cmd_simulate(config: &RunConfig) -> Result<()> {
    let sim = config
        .simulation
        .clone()
        .ok_or_else(|| Error::InvalidArgument("missing `simulation` block".into()))?;
    if sim.media == 0 {
        return Err(Error::InvalidArgument("simulation.media must be >= 1".into()));
    }
    sim.probe.validate()?;
    prepare_output(config)?;
    let extent = sim.resolved_extent();
    let grid = BeamformGrid::full(&sim.probe, sim.rows, sim.cols);
    let mut snr_lo = f64::INFINITY;
    let mut snr_hi = f64::NEG_INFINITY;
    for m in 0..sim.media {
        let seed = medium_seed(config.seed, m);
        let medium_id = format!("medium_{m:03}");
        let field = generate_scatterers(extent, sim.density, &sim.inclusions, seed)?;
        let motion = n2n_core::rf_sim::probe::MotionModel {
            seed: seed ^ 0x0170,
            ..sim.motion
        };
        let stack = generate_frame_stack(
            &sim.probe,
            &field,
            &sim.attenuation,
            &motion,
            &grid,
            sim.frames,
            sim.noise_sigma,
            seed ^ 0x5EED,
            medium_id.clone(),
        )?;
        let profile = snr_depth_profile(&stack)?;
        for &s in &profile.snr_db {
            if s.is_finite() {
                snr_lo = snr_lo.min(s);
                snr_hi = snr_hi.max(s);
            }
        }
        io::write_stack(&config.output_dir.join(format!("{medium_id}.rfc")), &stack)?;
    }
    println!(
        "simulated {} media x {} frames ({}x{} beamformed, noise sigma {}), \
         depth-SNR range [{snr_lo:.1}, {snr_hi:.1}] dB",
        sim.media, sim.frames, sim.rows, sim.cols, sim.noise_sigma
    );
    Ok(())
}

pub fn cmd_train(config: &RunConfig) -> Result<()> {
    let training = config
        .training
        .clone()
        .ok_or_else(|| Error::InvalidArgument("missing `training` block".into()))?;
    if training.data.is_empty() {
        return Err(Error::InvalidArgument("training.data lists no .rfc files".into()));
    }
    prepare_output(config)?;
    let mut stacks = Vec::with_capacity(training.data.len());
    for path in &training.data {
        stacks.push(io::read_stack(path).map_err(|e| match e {
            Error::Io(io) => Error::Io(io),
            other => Error::Format(format!("{}: {other}", path.display())),
        })?);
    }
    let (best, log) = train(
        training.model,
        &stacks,
        &training.train,
        Some(&config.output_dir),
    )?;
    fs::write(config.output_dir.join("train_log.csv"), log.to_csv())?;
    println!(
        "trained {} epochs on {} stacks; best validation loss {:.6e} at epoch {}",
        log.epochs.len(),
        stacks.len(),
        best.validation_loss,
        best.epoch
    );
    Ok(())
}

pub fn cmd_denoise(config: &RunConfig) -> Result<()> {
    let dn = config
        .denoise
        .clone()
        .ok_or_else(|| Error::InvalidArgument("missing `denoise` block".into()))?;
    prepare_output(config)?;
    let ckpt = io::load_checkpoint(&dn.checkpoint)?;
    let stack = io::read_stack(&dn.input)?;
    let frame = stack.frames.get(dn.frame_index).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "frame index {} out of range (stack has {} frames)",
            dn.frame_index,
            stack.frames.len()
        ))
    })?;
    let denoised = denoise_frame(&ckpt, frame)?;
    io::write_frame(&config.output_dir.join("denoised.rfc"), &denoised)?;
    let image = to_bmode(&denoised, dn.dynamic_range_db)?;
    io::write_pgm16(&config.output_dir.join("denoised.pgm"), &image)?;
    println!(
        "denoised frame {} of {} ({}x{})",
        dn.frame_index,
        dn.input.display(),
        denoised.rows,
        denoised.cols
    );
    Ok(())
}

pub fn cmd_eval(config: &RunConfig) -> Result<()> {
    let ev = config
        .evaluation
        .clone()
        .ok_or_else(|| Error::InvalidArgument("missing `evaluation` block".into()))?;
    prepare_output(config)?;
    let stack = io::read_stack(&ev.stack)?;
    let clean = stack
        .clean
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("evaluation stack has no clean reference".into()))?;
    let noisy = stack.frames.get(ev.frame_index).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "frame index {} out of range (stack has {} frames)",
            ev.frame_index,
            stack.frames.len()
        ))
    })?;
    let k = if ev.average_count == 0 {
        stack.frames.len()
    } else {
        ev.average_count
    };
    let averaged = average_frames(&stack, k)?;
    let ckpt = io::load_checkpoint(&ev.checkpoint)?;
    let denoised = denoise_frame(&ckpt, noisy)?;
    let dr = ev.dynamic_range_db;
    let report = compare_methods(
        &stack.medium_id,
        &to_bmode(clean, dr)?,
        &to_bmode(noisy, dr)?,
        &to_bmode(&averaged, dr)?,
        &to_bmode(&denoised, dr)?,
    )?;
    fs::write(config.output_dir.join("report.csv"), report.to_csv())?;
    let text = report.to_text();
    fs::write(config.output_dir.join("report.txt"), &text)?;
    print!("{text}");
    Ok(())
}

pub fn cmd_snr_profile(config: &RunConfig) -> Result<()> {
    let sp = config
        .snr_profile
        .clone()
        .ok_or_else(|| Error::InvalidArgument("missing `snr_profile` block".into()))?;
    prepare_output(config)?;
    let stack = io::read_stack(&sp.input)?;
    let profile = snr_depth_profile(&stack)?;
    let mut csv = String::from("depth_index,depth_mm,snr_db\n");
    for i in 0..profile.depth_index.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            profile.depth_index[i], profile.depth_mm[i], profile.snr_db[i]
        ));
    }
    write_profile_csv(&config.output_dir.join("snr_profile.csv"), &csv)?;
    println!(
        "snr profile over {} depth rows written to {}",
        profile.depth_index.len(),
        config.output_dir.join("snr_profile.csv").display()
    );
    Ok(())
}

fn write_profile_csv(path: &Path, csv: &str) -> Result<()> {
    fs::write(path, csv)?;
    Ok(())
}
