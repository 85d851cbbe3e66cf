//! RIFF/WAVE with 16-bit PCM samples, one or two channels.

use std::path::Path;

use super::{format_err, DataError};
use crate::byteio::Reader;
use crate::signal::Signal;

const PCM: u16 = 1;
const EXTENSIBLE: u16 = 0xfffe;

/// Parses a WAV file into channels-first samples `v / 32768`. Chunks other
/// than `fmt ` and `data` are skipped.
pub fn decode_wav(bytes: &[u8]) -> Result<Signal<f32>, DataError> {
    let mut r = Reader::new(bytes);
    let trunc = |t: crate::byteio::Truncated| format_err(t.offset, format!("truncated {}", t.what));
    if r.bytes(4, "riff").map_err(trunc)? != b"RIFF" {
        return Err(format_err(0, "expected RIFF"));
    }
    r.u32("riff size").map_err(trunc)?;
    if r.bytes(4, "wave").map_err(trunc)? != b"WAVE" {
        return Err(format_err(8, "expected WAVE"));
    }
    let mut format: Option<(usize, usize)> = None;
    loop {
        let at = r.pos();
        let id = r.bytes(4, "chunk id").map_err(trunc)?;
        let size = r.u32("chunk size").map_err(trunc)? as usize;
        if size > r.remaining() {
            return Err(format_err(at, format!("chunk of {size} bytes overruns the file")));
        }
        let body = r.bytes(size, "chunk").map_err(trunc)?;
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(format_err(at, "fmt chunk too short"));
                }
                let tag = u16::from_le_bytes([body[0], body[1]]);
                let channels = u16::from_le_bytes([body[2], body[3]]) as usize;
                let bits = u16::from_le_bytes([body[14], body[15]]);
                let pcm = tag == PCM || (tag == EXTENSIBLE && size >= 26 && body[24..26] == [1, 0]);
                if !pcm || bits != 16 {
                    return Err(DataError::Unsupported(format!("format tag {tag:#x} with {bits}-bit samples; need 16-bit PCM")));
                }
                if !(1..=2).contains(&channels) {
                    return Err(DataError::Unsupported(format!("{channels} channels; need 1 or 2")));
                }
                format = Some((channels, 2 * channels));
            }
            b"data" => {
                let (channels, frame) = format.ok_or_else(|| format_err(at, "data chunk before fmt chunk"))?;
                if size % frame != 0 {
                    return Err(format_err(at, "data chunk is not a whole number of frames"));
                }
                let frames = size / frame;
                if frames == 0 {
                    return Err(format_err(at, "no samples"));
                }
                let mut data = vec![0.0f32; frames * channels];
                for (t, fr) in body.chunks_exact(frame).enumerate() {
                    for c in 0..channels {
                        let v = i16::from_le_bytes([fr[2 * c], fr[2 * c + 1]]);
                        data[c * frames + t] = v as f32 / 32768.0;
                    }
                }
                return Signal::new(channels, &[frames], data).map_err(|e| DataError::Shape(e.to_string()));
            }
            _ => {}
        }
        if size % 2 == 1 && r.remaining() > 0 {
            r.u8("pad").map_err(trunc)?;
        }
    }
}

/// Writes 16-bit PCM with a 44-byte header; samples are rounded from
/// `x * 32768` and clamped.
pub fn encode_wav(x: &Signal<f32>, sample_rate: u32) -> Result<Vec<u8>, DataError> {
    if x.extents().len() != 1 || !(1..=2).contains(&x.channels()) {
        return Err(DataError::Shape(format!(
            "audio needs 1 or 2 channels over 1 axis, got {} over {:?}",
            x.channels(),
            x.extents()
        )));
    }
    let (c, n) = (x.channels(), x.extents()[0]);
    let data_len = (n * c * 2) as u32;
    let mut out = Vec::with_capacity(44 + data_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM.to_le_bytes());
    out.extend_from_slice(&(c as u16).to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2 * c as u32).to_le_bytes());
    out.extend_from_slice(&(2 * c as u16).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for t in 0..n {
        for ch in 0..c {
            let v = (x.data()[ch * n + t] * 32768.0).round();
            let v = if v.is_nan() { 0.0 } else { v.clamp(-32768.0, 32767.0) };
            out.extend_from_slice(&(v as i16).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn load_wav(path: impl AsRef<Path>) -> Result<Signal<f32>, DataError> {
    decode_wav(&std::fs::read(path)?)
}

pub fn save_wav(path: impl AsRef<Path>, x: &Signal<f32>, sample_rate: u32) -> Result<(), DataError> {
    std::fs::write(path, encode_wav(x, sample_rate)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_wave_full_scale() {
        let x = Signal::new(1, &[8], (0..8).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
        let s = decode_wav(&encode_wav(&x, 8000).unwrap()).unwrap();
        for (i, &v) in s.data().iter().enumerate() {
            let expect = if i % 2 == 0 { 32767.0 / 32768.0 } else { -1.0 };
            assert_eq!(v, expect);
        }
    }

    #[test]
    fn stereo_round_trip_within_one_lsb() {
        let x = Signal::new(2, &[100], (0..200).map(|i| (i as f32 * 0.37).sin() * 0.9).collect()).unwrap();
        let bytes = encode_wav(&x, 44100).unwrap();
        let y = decode_wav(&bytes).unwrap();
        assert_eq!(y.channels(), 2);
        for (a, b) in x.data().iter().zip(y.data()) {
            assert!((a - b).abs() <= 1.0 / 32768.0);
        }
        assert_eq!(encode_wav(&y, 44100).unwrap(), bytes);
    }

    #[test]
    fn skips_unknown_chunks() {
        let x = Signal::new(1, &[3], vec![0.5, -0.5, 0.25]).unwrap();
        let plain = encode_wav(&x, 8000).unwrap();
        let mut b = plain[..12].to_vec();
        b.extend_from_slice(b"LIST\x03\x00\x00\x00abc\x00");
        b.extend_from_slice(&plain[12..]);
        assert_eq!(decode_wav(&b).unwrap(), x);
    }

    #[test]
    fn rejects_bad_files() {
        let x = Signal::new(1, &[4], vec![0.0; 4]).unwrap();
        let b = encode_wav(&x, 8000).unwrap();
        assert!(decode_wav(&b[..b.len() - 1]).is_err());
        let mut b8 = b.clone();
        b8[34] = 8;
        assert!(matches!(decode_wav(&b8), Err(DataError::Unsupported(_))));
        let mut b3 = b.clone();
        b3[22] = 3;
        assert!(matches!(decode_wav(&b3), Err(DataError::Unsupported(_))));
        assert!(decode_wav(b"RIFX").is_err());
    }
}
