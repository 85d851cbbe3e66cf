//! `.wlcm` model files: magic `WLCM`, a version byte, the config, then named
//! little-endian f32 tensors.

use std::path::Path;

use super::{CodecConfig, CodecError, CodecModel, ModelParams};
use crate::byteio::{Reader, Truncated};
use crate::diffcore::Tensor;
use crate::signal::Kind;

pub const MAGIC: &[u8; 4] = b"WLCM";
pub const VERSION: u8 = 1;

fn bad(offset: usize, detail: impl Into<String>) -> CodecError {
    CodecError::Checkpoint {
        offset,
        detail: detail.into(),
    }
}

impl From<Truncated> for CodecError {
    fn from(t: Truncated) -> Self {
        bad(t.offset, format!("truncated {}", t.what))
    }
}

pub(crate) fn kind_code(kind: Kind) -> u8 {
    match kind {
        Kind::OneD => 1,
        Kind::TwoD => 2,
    }
}

pub(crate) fn kind_from_code(code: u8) -> Option<Kind> {
    match code {
        1 => Some(Kind::OneD),
        2 => Some(Kind::TwoD),
        _ => None,
    }
}

fn narrow<T: TryFrom<usize>>(v: usize, what: &str) -> Result<T, CodecError> {
    T::try_from(v).map_err(|_| CodecError::Config(format!("{what}={v} does not fit the checkpoint field")))
}

impl CodecModel {
    pub fn to_bytes(&self) -> Result<Vec<u8>, CodecError> {
        let c = &self.config;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(kind_code(c.kind));
        out.extend_from_slice(&narrow::<u16>(c.c_x, "c_x")?.to_le_bytes());
        out.push(narrow::<u8>(c.levels as usize, "levels")?);
        out.extend_from_slice(&narrow::<u16>(c.c_z, "c_z")?.to_le_bytes());
        out.extend_from_slice(&narrow::<u16>(c.c_hidden, "c_hidden")?.to_le_bytes());
        out.push(narrow::<u8>(c.depth, "depth")?);
        out.extend_from_slice(&c.noise_width.to_le_bytes());
        let tensors = self.params.tensors();
        out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
        for (name, t) in ModelParams::<f32>::names(c.depth).iter().zip(tensors) {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.push(t.shape().len() as u8);
            for &e in t.shape() {
                out.extend_from_slice(&(e as u32).to_le_bytes());
            }
            for v in t.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<CodecModel, CodecError> {
        let mut r = Reader::new(bytes);
        if r.bytes(4, "magic")? != MAGIC {
            return Err(bad(0, "bad magic, expected WLCM"));
        }
        let at = r.pos();
        let version = r.u8("version")?;
        if version != VERSION {
            return Err(bad(at, format!("unsupported version {version}")));
        }
        let at = r.pos();
        let kind = kind_from_code(r.u8("kind")?).ok_or_else(|| bad(at, "kind must be 1 or 2"))?;
        let config = CodecConfig {
            kind,
            c_x: r.u16("c_x")? as usize,
            levels: r.u8("levels")? as u32,
            c_z: r.u16("c_z")? as usize,
            c_hidden: r.u16("c_hidden")? as usize,
            depth: r.u8("depth")? as usize,
            noise_width: r.f32("noise_width")?,
        };
        config.validate().map_err(|e| bad(r.pos(), e.to_string()))?;
        let names = ModelParams::<f32>::names(config.depth);
        let at = r.pos();
        let count = r.u32("tensor count")? as usize;
        if count != names.len() {
            return Err(bad(at, format!("expected {} tensors, found {count}", names.len())));
        }
        let template = ModelParams::<f32>::zeros(&config);
        let mut params = template.clone();
        for ((name, expect), slot) in names.iter().zip(template.tensors()).zip(params.tensors_mut()) {
            let at = r.pos();
            let len = r.u16("name length")? as usize;
            let got = r.bytes(len, "name")?;
            if got != name.as_bytes() {
                return Err(bad(at, format!("expected tensor {name:?}, found {:?}", String::from_utf8_lossy(got))));
            }
            let at = r.pos();
            let rank = r.u8("rank")? as usize;
            let mut shape = Vec::with_capacity(rank.min(8));
            for _ in 0..rank {
                shape.push(r.u32("extent")? as usize);
            }
            if shape != expect.shape() {
                return Err(bad(at, format!("{name} has shape {shape:?}, config needs {:?}", expect.shape())));
            }
            let n = expect.numel();
            let raw = r.bytes(n * 4, "tensor data")?;
            let data = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
            *slot = Tensor::new(&shape, data).expect("shape checked");
        }
        if r.remaining() != 0 {
            return Err(bad(r.pos(), format!("{} trailing bytes", r.remaining())));
        }
        CodecModel::from_params(config, params)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CodecError> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<CodecModel, CodecError> {
        CodecModel::from_bytes(&std::fs::read(path)?)
    }
}
