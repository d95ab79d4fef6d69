//! `n2n`: simulate ultrasound RF frame stacks, train a Noise2Noise denoiser
//! on them, and evaluate it against frame averaging.
//!
//! Every run is driven by one JSON config file (strictly parsed; unknown
//! keys are errors) with CLI flags layered on top, and writes the fully
//! resolved config next to its outputs. Exit codes: 0 success, 1 invalid
//! arguments or config, 2 I/O failure, 3 numerical failure.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use n2n_core::{Error, Result};

use crate::config::{DenoiseConfig, EvaluationConfig, RunConfig, SnrProfileConfig};

#[derive(Parser)]
#[command(name = "n2n", version, about = "Noise2Noise denoising of simulated ultrasound RF data")]
struct Cli {
    /// JSON run configuration; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Root seed for all randomness (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate per-medium noisy frame stacks (.rfc) with clean references.
    Simulate {
        #[arg(long)]
        media: Option<usize>,
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        noise_sigma: Option<f64>,
    },
    /// Train the denoiser; writes best/latest checkpoints and a loss CSV.
    /// Reruns start fresh: interrupted runs are not resumed.
    Train {
        /// `.rfc` stacks to train on (overrides `training.data`).
        #[arg(long)]
        data: Vec<PathBuf>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Denoise one frame of a stack; writes the RF frame and a B-mode PGM.
    Denoise {
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        frame: Option<usize>,
    },
    /// Compare noisy input, frame averaging, and the denoiser against the
    /// stack's clean reference; writes CSV and text reports.
    Eval {
        #[arg(long)]
        stack: Option<PathBuf>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Frames in the averaging baseline (0 = all).
        #[arg(long)]
        average: Option<usize>,
        #[arg(long)]
        frame: Option<usize>,
    },
    /// SNR-versus-depth profile of a stack, as CSV.
    SnrProfile {
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::ShapeMismatch(_) | Error::Format(_) => 1,
        Error::Io(_) => 2,
        Error::Numerical(_) => 3,
    }
}

fn require_path(value: PathBuf, flag: &str) -> Result<PathBuf> {
    if value.as_os_str().is_empty() {
        Err(Error::InvalidArgument(format!(
            "{flag} is required (flag or config)"
        )))
    } else {
        Ok(value)
    }
}

/// Merge the config file (if any) with CLI overrides into a resolved
/// [`RunConfig`]. The root seed overwrites block-level seeds so one value
/// governs the whole run.
fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut run = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        run.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        run.seed = seed;
    }
    match &cli.command {
        Command::Simulate {
            media,
            frames,
            noise_sigma,
        } => {
            let sim = run.simulation.get_or_insert_with(Default::default);
            if let Some(m) = media {
                sim.media = *m;
            }
            if let Some(f) = frames {
                sim.frames = *f;
            }
            if let Some(s) = noise_sigma {
                sim.noise_sigma = *s;
            }
        }
        Command::Train { data, epochs } => {
            let tr = run.training.get_or_insert_with(Default::default);
            if !data.is_empty() {
                tr.data = data.clone();
            }
            if let Some(e) = epochs {
                tr.train.epochs = *e;
            }
            tr.train.seed = run.seed;
        }
        Command::Denoise {
            checkpoint,
            input,
            frame,
        } => {
            let dn = run.denoise.get_or_insert_with(DenoiseConfig::default);
            if let Some(c) = checkpoint {
                dn.checkpoint = c.clone();
            }
            if let Some(i) = input {
                dn.input = i.clone();
            }
            if let Some(f) = frame {
                dn.frame_index = *f;
            }
            dn.checkpoint = require_path(dn.checkpoint.clone(), "--checkpoint")?;
            dn.input = require_path(dn.input.clone(), "--input")?;
        }
        Command::Eval {
            stack,
            checkpoint,
            average,
            frame,
        } => {
            let ev = run.evaluation.get_or_insert_with(EvaluationConfig::default);
            if let Some(s) = stack {
                ev.stack = s.clone();
            }
            if let Some(c) = checkpoint {
                ev.checkpoint = c.clone();
            }
            if let Some(a) = average {
                ev.average_count = *a;
            }
            if let Some(f) = frame {
                ev.frame_index = *f;
            }
            ev.stack = require_path(ev.stack.clone(), "--stack")?;
            ev.checkpoint = require_path(ev.checkpoint.clone(), "--checkpoint")?;
        }
        Command::SnrProfile { input } => {
            let sp = run.snr_profile.get_or_insert_with(SnrProfileConfig::default);
            if let Some(i) = input {
                sp.input = i.clone();
            }
            sp.input = require_path(sp.input.clone(), "--input")?;
        }
    }
    Ok(run)
}

fn run(cli: &Cli) -> Result<()> {
    let config = resolve(cli)?;
    match cli.command {
        Command::Simulate { .. } => commands::cmd_simulate(&config),
        Command::Train { .. } => commands::cmd_train(&config),
        Command::Denoise { .. } => commands::cmd_denoise(&config),
        Command::Eval { .. } => commands::cmd_eval(&config),
        Command::SnrProfile { .. } => commands::cmd_snr_profile(&config),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}
