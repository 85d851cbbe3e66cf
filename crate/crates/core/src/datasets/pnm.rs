//! Binary PGM (P5) and PPM (P6) with 8-bit samples.

use std::path::Path;

use super::{format_err, DataError};
use crate::signal::Signal;

struct Header {
    channels: usize,
    width: usize,
    height: usize,
    data_start: usize,
}

fn skip_space_and_comments(b: &[u8], mut i: usize) -> usize {
    loop {
        while i < b.len() && b[i].is_ascii_whitespace() {
            i += 1;
        }
        if i < b.len() && b[i] == b'#' {
            while i < b.len() && b[i] != b'\n' && b[i] != b'\r' {
                i += 1;
            }
        } else {
            return i;
        }
    }
}

fn header_number(b: &[u8], i: &mut usize, what: &str) -> Result<usize, DataError> {
    *i = skip_space_and_comments(b, *i);
    let start = *i;
    while *i < b.len() && b[*i].is_ascii_digit() {
        *i += 1;
    }
    if start == *i {
        return Err(format_err(start, format!("expected {what}")));
    }
    std::str::from_utf8(&b[start..*i])
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&v| v <= 1 << 20)
        .ok_or_else(|| format_err(start, format!("{what} out of range")))
}

fn parse_header(b: &[u8]) -> Result<Header, DataError> {
    let channels = match b.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(format_err(0, "expected P5 or P6 magic")),
    };
    let mut i = 2;
    let width = header_number(b, &mut i, "width")?;
    let height = header_number(b, &mut i, "height")?;
    let at = skip_space_and_comments(b, i);
    let maxval = header_number(b, &mut i, "maxval")?;
    if maxval != 255 {
        return Err(DataError::Unsupported(format!("maxval {maxval} at byte {at}; only 255 is supported")));
    }
    if width == 0 || height == 0 {
        return Err(format_err(at, "zero-sized image"));
    }
    match b.get(i) {
        Some(c) if c.is_ascii_whitespace() => i += 1,
        _ => return Err(format_err(i, "expected one whitespace byte before the pixel data")),
    }
    Ok(Header {
        channels,
        width,
        height,
        data_start: i,
    })
}

/// Parses P5/P6 bytes into a channels-first signal with samples `v/127.5 - 1`.
pub fn decode_pnm(bytes: &[u8]) -> Result<Signal<f32>, DataError> {
    let h = parse_header(bytes)?;
    let n = h.channels * h.width * h.height;
    let payload = &bytes[h.data_start..];
    if payload.len() < n {
        return Err(format_err(bytes.len(), format!("pixel data truncated: {} of {n} bytes", payload.len())));
    }
    if payload.len() > n {
        return Err(format_err(h.data_start + n, "trailing bytes after pixel data"));
    }
    let plane = h.width * h.height;
    let mut data = vec![0.0f32; n];
    for (p, px) in payload.chunks_exact(h.channels).enumerate() {
        for (c, &v) in px.iter().enumerate() {
            data[c * plane + p] = v as f32 / 127.5 - 1.0;
        }
    }
    Signal::new(h.channels, &[h.height, h.width], data).map_err(|e| DataError::Shape(e.to_string()))
}

/// Writes a 1- or 3-channel 2D signal with a canonical header, rounding
/// `(x + 1) * 127.5` and clamping to `[0, 255]`.
pub fn encode_pnm(x: &Signal<f32>) -> Result<Vec<u8>, DataError> {
    if x.extents().len() != 2 || !(x.channels() == 1 || x.channels() == 3) {
        return Err(DataError::Shape(format!(
            "images need 1 or 3 channels over 2 axes, got {} over {:?}",
            x.channels(),
            x.extents()
        )));
    }
    let (h, w) = (x.extents()[0], x.extents()[1]);
    let magic = if x.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    let plane = h * w;
    out.reserve(plane * x.channels());
    for p in 0..plane {
        for c in 0..x.channels() {
            let v = ((x.data()[c * plane + p] + 1.0) * 127.5).round();
            out.push(if v.is_nan() { 0 } else { v.clamp(0.0, 255.0) as u8 });
        }
    }
    Ok(out)
}

pub fn load_image(path: impl AsRef<Path>) -> Result<Signal<f32>, DataError> {
    decode_pnm(&std::fs::read(path)?)
}

pub fn save_image(path: impl AsRef<Path>, x: &Signal<f32>) -> Result<(), DataError> {
    std::fs::write(path, encode_pnm(x)?)?;
    Ok(())
}
