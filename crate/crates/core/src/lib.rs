//! Wavelet learned lossy compression.
//!
//! A wavelet packet transform trades resolution for channels, a single
//! linear layer projects the subbands to a small latent, and a Gaussian-CDF
//! compander maps the latent onto the signed 8-bit range so it can be rounded
//! and entropy coded. Decoding runs a residual CNN on the decompanded latent
//! and inverts the wavelet packet transform.

mod byteio;
pub mod bitstream;
pub mod codec;
pub mod compressed_learning;
pub mod datasets;
pub mod diffcore;
pub mod metrics;
pub mod normal;
pub mod signal;
pub mod wavelet;

pub use signal::{Kind, Signal};
