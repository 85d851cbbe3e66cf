//! Distortion, resampling baselines, throughput and plain-text reports.

mod bench;
mod quality;
mod report;
mod resample;

pub use bench::{bench, bench_codec, Throughput, ThroughputReport};
pub use quality::{ms_ssim, psnr, psnr_per_channel, quality, ssim, MsSsim, QualityReport, MS_SSIM_MIN_EXTENT};
pub use report::{Record, Table};
pub use resample::{bicubic_baseline, resize};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("signals differ in shape: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("{0} needs a 2D signal")]
    NotTwoD(&'static str),
    #[error("peak must be positive, got {0}")]
    Peak(f64),
    #[error("signal too small for {what}: extents {extents:?}")]
    TooSmall { what: &'static str, extents: Vec<usize> },
}

/// Peak for signals normalised to `[-1, 1]`.
pub const PEAK_UNIT: f64 = 2.0;
/// Peak for 8-bit sample values.
pub const PEAK_8BIT: f64 = 255.0;
