//! Reading and writing signals, padding, dataset splits and patch sampling,
//! and synthetic stand-in data.

mod dataset;
mod pad;
mod pnm;
mod synth;
mod tensor_file;
mod wav;

pub use dataset::{load_dir, sample_patches, split_indices, Dataset};
pub use pad::{crop, pad_to_divisible};
pub use pnm::{decode_pnm, encode_pnm, load_image, save_image};
pub(crate) use synth::fft2;
pub use synth::{synth_audio, synth_image, SynthImageParams};
pub use tensor_file::{decode_tensor, encode_tensor, load_tensor, save_tensor, TENSOR_MAGIC};
pub use wav::{decode_wav, encode_wav, load_wav, save_wav};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("malformed file at byte {offset}: {detail}")]
    Format { offset: usize, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn format_err(offset: usize, detail: impl Into<String>) -> DataError {
    DataError::Format {
        offset,
        detail: detail.into(),
    }
}
