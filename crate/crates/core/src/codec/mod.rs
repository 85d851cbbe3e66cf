//! The codec: wavelet packet analysis, a linear projection, Gaussian-CDF
//! companding to 8 bits, and a convolutional decoder, with training and
//! checkpoint I/O.

mod checkpoint;
pub mod companding;
mod config;
mod latent;
mod model;
mod pipeline;
mod train;

pub use checkpoint::{MAGIC as CHECKPOINT_MAGIC, VERSION as CHECKPOINT_VERSION};
pub(crate) use checkpoint::{kind_code, kind_from_code};
pub use config::{CodecConfig, TrainOptions};
pub use latent::QuantizedLatent;
pub use model::{bottleneck_noise, training_graph, CodecModel, ModelParams};
pub use train::{train, train_with, TrainReport};

use thiserror::Error;

use crate::bitstream::BitstreamError;
use crate::diffcore::DiffError;
use crate::wavelet::WaveletError;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error("training diverged at step {step} (loss {loss})")]
    Diverged { step: usize, loss: f64 },
    #[error("checkpoint error at byte {offset}: {detail}")]
    Checkpoint { offset: usize, detail: String },
    #[error(transparent)]
    Bitstream(#[from] BitstreamError),
    #[error("model mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
