//! Raw f32 tensors with a minimal shape header: magic `WF32`, rank u8,
//! u32 extents (channels first), little-endian f32 values.

use std::path::Path;

use super::{format_err, DataError};
use crate::byteio::Reader;
use crate::signal::Signal;

pub const TENSOR_MAGIC: &[u8; 4] = b"WF32";

pub fn encode_tensor(x: &Signal<f32>) -> Vec<u8> {
    let mut out = TENSOR_MAGIC.to_vec();
    out.push(1 + x.extents().len() as u8);
    out.extend_from_slice(&(x.channels() as u32).to_le_bytes());
    for &e in x.extents() {
        out.extend_from_slice(&(e as u32).to_le_bytes());
    }
    for v in x.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> Result<Signal<f32>, DataError> {
    let mut r = Reader::new(bytes);
    let trunc = |t: crate::byteio::Truncated| format_err(t.offset, format!("truncated {}", t.what));
    if r.bytes(4, "magic").map_err(trunc)? != TENSOR_MAGIC {
        return Err(format_err(0, "expected WF32 magic"));
    }
    let rank = r.u8("rank").map_err(trunc)? as usize;
    if !(2..=3).contains(&rank) {
        return Err(format_err(4, format!("rank {rank}; need 2 or 3")));
    }
    let mut shape = Vec::with_capacity(rank);
    for _ in 0..rank {
        shape.push(r.u32("extent").map_err(trunc)? as usize);
    }
    let n = shape.iter().try_fold(1usize, |a, &e| a.checked_mul(e)).filter(|&n| n > 0);
    let n = n.ok_or_else(|| format_err(5, "empty or oversized shape"))?;
    if n.checked_mul(4) != Some(r.remaining()) {
        return Err(format_err(r.pos(), format!("{} data bytes for {n} values", r.remaining())));
    }
    let raw = r.bytes(4 * n, "values").map_err(trunc)?;
    let data = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    Signal::new(shape[0], &shape[1..], data).map_err(|e| DataError::Shape(e.to_string()))
}

pub fn load_tensor(path: impl AsRef<Path>) -> Result<Signal<f32>, DataError> {
    decode_tensor(&std::fs::read(path)?)
}

pub fn save_tensor(path: impl AsRef<Path>, x: &Signal<f32>) -> Result<(), DataError> {
    std::fs::write(path, encode_tensor(x))?;
    Ok(())
}
