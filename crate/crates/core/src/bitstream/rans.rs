//! 32-bit rANS with byte-wise renormalisation.

use super::{BitstreamError, FreqTable, SCALE_BITS};

const LOWER: u32 = 1 << 23;

/// Encodes `symbols` with `table`. An empty input gives an empty stream.
pub fn rans_encode(symbols: &[i8], table: &FreqTable) -> Result<Vec<u8>, BitstreamError> {
    if symbols.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(symbols.len() / 2 + 8);
    let mut x = LOWER;
    for &s in symbols.iter().rev() {
        let f = table.count(s);
        if f == 0 {
            return Err(BitstreamError::ZeroFrequency(s));
        }
        let x_max = ((LOWER >> SCALE_BITS) << 8) * f;
        while x >= x_max {
            out.push(x as u8);
            x >>= 8;
        }
        x = ((x / f) << SCALE_BITS) + (x % f) + table.start(s);
    }
    out.extend_from_slice(&x.to_be_bytes());
    out.reverse();
    Ok(out)
}

/// Decodes exactly `n` symbols. The stream must be consumed completely and
/// end in the encoder's initial state, so truncated or padded streams fail.
pub fn rans_decode(bytes: &[u8], table: &FreqTable, n: usize) -> Result<Vec<i8>, BitstreamError> {
    if n == 0 {
        return if bytes.is_empty() {
            Ok(Vec::new())
        } else {
            Err(BitstreamError::Stream("bytes present for zero symbols"))
        };
    }
    if bytes.len() < 4 {
        return Err(BitstreamError::Stream("shorter than the initial state"));
    }
    let lookup = table.lookup();
    if lookup.is_empty() {
        return Err(BitstreamError::Stream("empty table"));
    }
    let mut x = u32::from_le_bytes(bytes[..4].try_into().unwrap());
    let mut pos = 4;
    let mask = (1u32 << SCALE_BITS) - 1;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let slot = x & mask;
        let s = lookup[slot as usize];
        x = table.count(s) * (x >> SCALE_BITS) + slot - table.start(s);
        while x < LOWER {
            let b = *bytes.get(pos).ok_or(BitstreamError::Stream("ran out of bytes"))?;
            x = (x << 8) | b as u32;
            pos += 1;
        }
        out.push(s);
    }
    if pos != bytes.len() {
        return Err(BitstreamError::Stream("trailing bytes"));
    }
    if x != LOWER {
        return Err(BitstreamError::Stream("final state mismatch"));
    }
    Ok(out)
}
