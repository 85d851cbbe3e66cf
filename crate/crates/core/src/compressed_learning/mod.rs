//! Classification on codec latents versus resolution-reduced pixels of the
//! same dimensionality, on a synthetic task whose class evidence lives in
//! fine texture.

mod classifier;
mod compare;
mod reference;
mod task;

pub use classifier::{ClassifierConfig, ConvClassifier};
pub use compare::{featurize, match_downsample_factor, run_comparison, ComparisonReport, FeatureMode};
pub use reference::{spectral_features, LogisticRegression};
pub use task::{gen_texture_task, Calibration, LabeledSet, TaskSpec, TextureTask};

use thiserror::Error;

use crate::codec::CodecError;
use crate::diffcore::DiffError;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("task calibration failed: full-resolution accuracy {full:.3} (need >= 0.9), 8x-downsampled accuracy {downsampled:.3} (need <= 0.6); adjust the task parameters")]
    Calibration { full: f64, downsampled: f64 },
    #[error("feature dimensions differ by more than 1%: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no downsampling factor of {extents:?} matches {target} features")]
    NoMatchingFactor { extents: Vec<usize>, target: usize },
    #[error("inconclusive: neither representation learned the task (latent {latent:.3}, downsampled {downsampled:.3})")]
    Inconclusive { latent: f64, downsampled: f64 },
    #[error("invalid task: {0}")]
    Spec(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Diff(#[from] DiffError),
}
