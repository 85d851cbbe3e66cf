//! Lossless coding of quantized latents: static order-0 rANS per channel and
//! the `.wllc` container.

mod container;
mod freq;
mod rans;

pub use container::{compression_ratio, read_container, write_container, ContainerMeta, MAGIC, MAX_LATENT_VALUES, VERSION};
pub use freq::{FreqTable, SCALE, SCALE_BITS};
pub use rans::{rans_decode, rans_encode};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitstreamError {
    #[error("cannot build a frequency table from no symbols")]
    Empty,
    #[error("symbol {0} has zero frequency in the table")]
    ZeroFrequency(i8),
    #[error("frequency table counts sum to {0}, expected 4096")]
    TableSum(u32),
    #[error("rANS stream is truncated or corrupt: {0}")]
    Stream(&'static str),
    #[error("container error at byte {offset}: {detail}")]
    Format { offset: usize, detail: String },
    #[error("container metadata is inconsistent: {0}")]
    Meta(String),
}

/// Empirical order-0 entropy of `symbols` in bits.
pub fn entropy_bits(symbols: &[i8]) -> f64 {
    let mut counts = [0usize; 256];
    for &s in symbols {
        counts[(s as i16 + 128) as usize] += 1;
    }
    let n = symbols.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            -c * (c / n).log2()
        })
        .sum()
}
