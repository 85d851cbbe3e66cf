use std::path::Path;

use anyhow::{bail, Context, Result};
use walloc::datasets::{load_image, load_tensor, load_wav, save_image, save_tensor, save_wav};
use walloc::{Kind, Signal};

fn extension(path: &Path) -> String {
    path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase()
}

/// Loads a PPM/PGM image, a WAV file or a raw tensor, by extension.
pub fn load_signal(path: &Path) -> Result<Signal<f32>> {
    let x = match extension(path).as_str() {
        "ppm" | "pgm" => load_image(path),
        "wav" => load_wav(path),
        "f32" => load_tensor(path),
        other => bail!("{}: unsupported extension {other:?} (use .ppm, .pgm, .wav or .f32)", path.display()),
    };
    x.with_context(|| format!("reading {}", path.display()))
}

pub fn save_signal(path: &Path, x: &Signal<f32>, sample_rate: u32) -> Result<()> {
    let r = match (extension(path).as_str(), x.kind()) {
        ("ppm" | "pgm", Kind::TwoD) => save_image(path, x),
        ("wav", Kind::OneD) => save_wav(path, x, sample_rate),
        ("f32", _) => save_tensor(path, x),
        (ext, kind) => bail!("{}: cannot write a {kind:?} signal as {ext:?}", path.display()),
    };
    r.with_context(|| format!("writing {}", path.display()))
}

/// Rescales so the largest magnitude is one; all-zero signals are unchanged.
pub fn normalize_peak(x: &Signal<f32>) -> Signal<f32> {
    let peak = x.data().iter().fold(0.0f32, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        x.map(|v| v / peak)
    } else {
        x.clone()
    }
}
