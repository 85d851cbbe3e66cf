//! `walloc`: train, run and evaluate wavelet learned lossy codecs.

mod commands;
mod files;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "walloc", version, about = "Wavelet learned lossy compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SignalKind {
    Image,
    Audio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Image,
    Audio,
    /// Unlabeled images from the texture classification task.
    Texture,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Texture,
}

#[derive(Subcommand)]
enum Command {
    /// Train a codec on a directory of images or audio files.
    Train {
        #[arg(long, value_enum)]
        kind: SignalKind,
        /// key=value config; defaults to the 16x image or 5x audio preset.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lr: Option<f64>,
        /// Patch extent per axis; defaults to 64 for images and 8192 for audio.
        #[arg(long)]
        patch: Option<usize>,
        /// Number of random patches drawn from the data.
        #[arg(long, default_value_t = 512)]
        patches: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compress a file into a container.
    Encode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, required_unless_present = "latent_only")]
        out: Option<PathBuf>,
        /// Also write the unrounded companded latent as a raw tensor.
        #[arg(long)]
        latent_only: Option<PathBuf>,
    },
    /// Decompress a container.
    Decode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Sample rate written to WAV output.
        #[arg(long, default_value_t = 44_100)]
        sample_rate: u32,
    },
    /// Quality, compression ratio and dimensionality reduction over a directory.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Process files on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Encode and decode throughput on a synthetic input.
    Bench {
        #[arg(long)]
        model: PathBuf,
        /// `WxH` for images, a sample count for audio.
        #[arg(long)]
        size: String,
        #[arg(long, default_value_t = 10)]
        reps: usize,
    },
    /// Decode a single nonzero latent value per channel.
    ProbeBasis {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 31, allow_negative_numbers = true)]
        amplitude: i8,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify latents against downsampled pixels of equal dimension.
    Compare {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "texture")]
        task: Task,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value_t = 600)]
        samples: usize,
        #[arg(long, default_value_t = 30)]
        epochs: usize,
    },
    /// Write synthetic training or test data.
    SynthData {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 16)]
        count: usize,
        /// Image side or audio length.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Train {
            kind,
            config,
            data,
            steps,
            seed,
            lr,
            patch,
            patches,
            out,
        } => commands::train(commands::TrainArgs {
            kind,
            config,
            data,
            steps,
            seed,
            lr,
            patch,
            patches,
            out,
        }),
        Command::Encode {
            model,
            input,
            out,
            latent_only,
        } => commands::encode(&model, &input, out.as_deref(), latent_only.as_deref()),
        Command::Decode {
            model,
            input,
            out,
            sample_rate,
        } => commands::decode(&model, &input, &out, sample_rate),
        Command::Eval { model, data, parallel } => commands::eval(&model, &data, parallel),
        Command::Bench { model, size, reps } => commands::bench(&model, &size, reps),
        Command::ProbeBasis { model, amplitude, out } => commands::probe_basis(&model, amplitude, &out),
        Command::Compare {
            model,
            task: Task::Texture,
            seeds,
            samples,
            epochs,
        } => commands::compare(&model, seeds, samples, epochs),
        Command::SynthData {
            kind,
            count,
            size,
            seed,
            out,
        } => commands::synth_data(kind, count, size, seed, &out),
    }
}
