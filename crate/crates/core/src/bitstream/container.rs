//! The `.wllc` container. All integers little-endian, floats IEEE-754
//! binary32:
//!
//! ```text
//! "WLLC" version:u8 kind:u8 levels:u8 c_x:u16 c_z:u16
//! original extents: u32 per axis
//! padded extents:   u32 per axis
//! scales:           f32 x c_z
//! tables, per channel: lo:i8 hi:i8, then a LEB128 count per symbol lo..=hi
//! payloads, per channel: length:u32, rANS bytes
//! ```

use super::{rans_decode, rans_encode, BitstreamError, FreqTable, SCALE};
use crate::byteio::{Reader, Truncated};
use crate::codec::{kind_code, kind_from_code, QuantizedLatent};
use crate::signal::Kind;

pub const MAGIC: &[u8; 4] = b"WLLC";
pub const VERSION: u8 = 1;
/// Upper bound on latent values a container may declare.
pub const MAX_LATENT_VALUES: usize = 1 << 26;

/// Everything in a container besides the latent values.
#[derive(Clone, Debug, PartialEq)]
pub struct ContainerMeta {
    pub kind: Kind,
    pub levels: u32,
    pub c_x: usize,
    /// Signal extents before padding.
    pub original_extents: Vec<usize>,
    /// Signal extents after padding to a multiple of `2^levels`.
    pub padded_extents: Vec<usize>,
    /// Compander scale per latent channel.
    pub scales: Vec<f32>,
}

impl ContainerMeta {
    pub fn latent_extents(&self) -> Vec<usize> {
        self.padded_extents.iter().map(|e| e >> self.levels).collect()
    }

    fn validate(&self) -> Result<(), String> {
        let d = self.kind.dims();
        if self.original_extents.len() != d || self.padded_extents.len() != d {
            return Err(format!("a {d}D container needs {d} extents per list"));
        }
        if self.levels > 24 || self.c_x == 0 || self.c_x > u16::MAX as usize {
            return Err(format!("levels={} c_x={} out of range", self.levels, self.c_x));
        }
        if self.scales.is_empty() || self.scales.len() > u16::MAX as usize {
            return Err(format!("{} latent channels out of range", self.scales.len()));
        }
        if self.scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err("scales must be finite and positive".into());
        }
        let block = 1usize << self.levels;
        for (&o, &p) in self.original_extents.iter().zip(&self.padded_extents) {
            if o == 0 || o > p || p % block != 0 || p > u32::MAX as usize {
                return Err(format!("original extent {o} and padded extent {p} are inconsistent for 2^{}", self.levels));
            }
        }
        let n = self
            .latent_extents()
            .iter()
            .try_fold(self.scales.len(), |a, &e| a.checked_mul(e))
            .unwrap_or(usize::MAX);
        if n > MAX_LATENT_VALUES {
            return Err(format!("{n} latent values exceed the limit"));
        }
        Ok(())
    }
}

fn put_varint(out: &mut Vec<u8>, mut v: u32) {
    loop {
        let b = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

fn format_err(offset: usize, detail: impl Into<String>) -> BitstreamError {
    BitstreamError::Format {
        offset,
        detail: detail.into(),
    }
}

impl From<Truncated> for BitstreamError {
    fn from(t: Truncated) -> Self {
        format_err(t.offset, format!("truncated {}", t.what))
    }
}

fn get_varint(r: &mut Reader<'_>) -> Result<u32, BitstreamError> {
    let start = r.pos();
    let mut v: u32 = 0;
    for shift in (0..35).step_by(7) {
        let b = r.u8("table count")?;
        if shift == 28 && b > 0x0f {
            return Err(format_err(start, "varint overflows u32"));
        }
        v |= ((b & 0x7f) as u32) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
    }
    Err(format_err(start, "varint too long"))
}

/// Serialises a quantized latent and its metadata.
pub fn write_container(q: &QuantizedLatent, meta: &ContainerMeta) -> Result<Vec<u8>, BitstreamError> {
    meta.validate().map_err(BitstreamError::Meta)?;
    if q.channels() != meta.scales.len() || q.extents() != meta.latent_extents() {
        return Err(BitstreamError::Meta(format!(
            "latent {}x{:?} does not match {} scales over {:?}",
            q.channels(),
            q.extents(),
            meta.scales.len(),
            meta.latent_extents()
        )));
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(kind_code(meta.kind));
    out.push(meta.levels as u8);
    out.extend_from_slice(&(meta.c_x as u16).to_le_bytes());
    out.extend_from_slice(&(meta.scales.len() as u16).to_le_bytes());
    for &e in meta.original_extents.iter().chain(&meta.padded_extents) {
        out.extend_from_slice(&(e as u32).to_le_bytes());
    }
    for s in &meta.scales {
        out.extend_from_slice(&s.to_le_bytes());
    }
    let tables: Vec<FreqTable> = (0..q.channels()).map(|c| FreqTable::build(q.channel(c))).collect::<Result<_, _>>()?;
    for t in &tables {
        let (lo, hi) = t.support();
        out.push(lo as u8);
        out.push(hi as u8);
        for s in lo..=hi {
            put_varint(&mut out, t.count(s));
        }
    }
    for (c, t) in tables.iter().enumerate() {
        let payload = rans_encode(q.channel(c), t)?;
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
    }
    Ok(out)
}

/// Parses a container, checking every declared length against the input.
pub fn read_container(bytes: &[u8]) -> Result<(QuantizedLatent, ContainerMeta), BitstreamError> {
    let mut r = Reader::new(bytes);
    if r.bytes(4, "magic")? != MAGIC {
        return Err(format_err(0, "bad magic, expected WLLC"));
    }
    let at = r.pos();
    let version = r.u8("version")?;
    if version != VERSION {
        return Err(format_err(at, format!("unsupported version {version}")));
    }
    let at = r.pos();
    let kind = kind_from_code(r.u8("kind")?).ok_or_else(|| format_err(at, "kind must be 1 or 2"))?;
    let levels = r.u8("levels")? as u32;
    let c_x = r.u16("c_x")? as usize;
    let at = r.pos();
    let c_z = r.u16("c_z")? as usize;
    if c_z == 0 {
        return Err(format_err(at, "zero latent channels"));
    }
    let d = kind.dims();
    let mut ext = Vec::with_capacity(2 * d);
    for _ in 0..2 * d {
        ext.push(r.u32("extent")? as usize);
    }
    if r.remaining() < 4 * c_z {
        return Err(format_err(r.pos(), "truncated scales"));
    }
    let scales = (0..c_z).map(|_| r.f32("scale")).collect::<Result<Vec<_>, _>>()?;
    let meta = ContainerMeta {
        kind,
        levels,
        c_x,
        original_extents: ext[..d].to_vec(),
        padded_extents: ext[d..].to_vec(),
        scales,
    };
    meta.validate().map_err(|m| format_err(5, m))?;

    let mut tables = Vec::with_capacity(c_z);
    for _ in 0..c_z {
        let at = r.pos();
        let lo = r.u8("table range")? as i8;
        let hi = r.u8("table range")? as i8;
        if lo > hi || lo == i8::MIN {
            return Err(format_err(at, format!("bad symbol range {lo}..={hi}")));
        }
        let mut counts = [0u32; 256];
        for s in lo..=hi {
            counts[(s as i16 + 128) as usize] = get_varint(&mut r)?;
        }
        let sum = counts.iter().try_fold(0u32, |a, &c| a.checked_add(c));
        if sum != Some(SCALE) {
            return Err(format_err(at, "table counts do not sum to 4096"));
        }
        tables.push(FreqTable::from_counts(counts)?);
    }

    let plane: usize = meta.latent_extents().iter().product();
    let mut data = Vec::with_capacity(plane * c_z);
    for t in &tables {
        let at = r.pos();
        let len = r.u32("payload length")? as usize;
        if len > r.remaining() {
            return Err(format_err(at, format!("payload length {len} exceeds the {} remaining bytes", r.remaining())));
        }
        let payload = r.bytes(len, "payload")?;
        let symbols = rans_decode(payload, t, plane).map_err(|e| format_err(at + 4, e.to_string()))?;
        if symbols.contains(&i8::MIN) {
            return Err(format_err(at + 4, "decoded symbol -128"));
        }
        data.extend_from_slice(&symbols);
    }
    if r.remaining() != 0 {
        return Err(format_err(r.pos(), format!("{} trailing bytes", r.remaining())));
    }
    let q = QuantizedLatent::new(c_z, &meta.latent_extents(), data).map_err(|e| format_err(0, e.to_string()))?;
    Ok((q, meta))
}

/// Original signal bytes (8-bit image samples, 16-bit audio samples) over
/// the container length.
pub fn compression_ratio(meta: &ContainerMeta, container_len: usize) -> f64 {
    let bytes_per_sample = match meta.kind {
        Kind::OneD => 2,
        Kind::TwoD => 1,
    };
    let samples = meta.c_x * meta.original_extents.iter().product::<usize>();
    (samples * bytes_per_sample) as f64 / container_len.max(1) as f64
}
