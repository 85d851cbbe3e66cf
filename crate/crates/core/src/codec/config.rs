use std::fmt::Write as _;

use super::CodecError;
use crate::signal::Kind;

/// Architecture of a codec.
#[derive(Clone, Debug, PartialEq)]
pub struct CodecConfig {
    pub kind: Kind,
    /// Input channels.
    pub c_x: usize,
    /// Wavelet packet levels.
    pub levels: u32,
    /// Latent channels.
    pub c_z: usize,
    /// Decoder hidden width.
    pub c_hidden: usize,
    /// Residual blocks in the decoder.
    pub depth: usize,
    /// Width of the uniform training noise in quantizer steps.
    pub noise_width: f32,
}

/// Optimisation settings that may accompany a config file.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainOptions {
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
    /// Record the mean loss every this many steps.
    pub log_every: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            steps: 1000,
            batch_size: 8,
            lr: 1e-4,
            seed: 0,
            log_every: 50,
        }
    }
}

impl CodecConfig {
    fn preset(kind: Kind, c_x: usize, levels: u32, c_z: usize) -> Self {
        CodecConfig {
            kind,
            c_x,
            levels,
            c_z,
            c_hidden: 64,
            depth: 4,
            noise_width: 1.0,
        }
    }

    /// RGB, 4x dimensionality reduction.
    pub fn image_4x() -> Self {
        Self::preset(Kind::TwoD, 3, 3, 48)
    }

    /// RGB, 16x dimensionality reduction.
    pub fn image_16x() -> Self {
        Self::preset(Kind::TwoD, 3, 3, 12)
    }

    /// Stereo audio, 512/108 reduction.
    pub fn audio_5x() -> Self {
        Self::preset(Kind::OneD, 2, 8, 108)
    }

    /// Stereo audio, 512/27 reduction.
    pub fn audio_20x() -> Self {
        Self::preset(Kind::OneD, 2, 8, 27)
    }

    pub fn shipped() -> [(&'static str, CodecConfig); 4] {
        [
            ("image_4x", Self::image_4x()),
            ("image_16x", Self::image_16x()),
            ("audio_5x", Self::audio_5x()),
            ("audio_20x", Self::audio_20x()),
        ]
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        let bad = |m: String| Err(CodecError::Config(m));
        if self.c_x == 0 || self.c_z == 0 || self.c_hidden == 0 {
            return bad("channel counts must be positive".into());
        }
        if self.levels as usize * self.kind.dims() > 24 {
            return bad(format!("{} levels is too deep", self.levels));
        }
        if self.c_z > self.subband_channels() {
            return bad(format!("c_z={} exceeds {} subband channels", self.c_z, self.subband_channels()));
        }
        if !(self.noise_width.is_finite() && self.noise_width >= 0.0) {
            return bad(format!("noise_width={} must be finite and non-negative", self.noise_width));
        }
        Ok(())
    }

    /// Subband channels after the wavelet packet transform, `C_x * 2^(J*d)`.
    pub fn subband_channels(&self) -> usize {
        crate::wavelet::subband_channels(self.c_x, self.levels, self.kind)
    }

    /// Extent divisor along every axis.
    pub fn block(&self) -> usize {
        1 << self.levels
    }

    /// Input elements per latent element.
    pub fn dimensionality_reduction(&self) -> f64 {
        self.subband_channels() as f64 / self.c_z as f64
    }

    /// Weights plus biases of the analysis projection.
    pub fn analysis_params(&self) -> usize {
        (self.subband_channels() + 1) * self.c_z
    }

    /// Parses flat `key = value` lines. `#` starts a comment. Keys not in
    /// the config or the training options are rejected.
    pub fn parse(text: &str) -> Result<(CodecConfig, TrainOptions), CodecError> {
        let mut cfg = CodecConfig::image_4x();
        let mut opts = TrainOptions::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| CodecError::Config(format!("line {}: {m}: {raw:?}", n + 1));
            let (k, v) = line.split_once('=').ok_or_else(|| err("expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            let num = || err("invalid number");
            match k {
                "kind" => {
                    cfg.kind = match v {
                        "1d" | "audio" => Kind::OneD,
                        "2d" | "image" => Kind::TwoD,
                        _ => return Err(err("kind must be 1d or 2d")),
                    }
                }
                "c_x" => cfg.c_x = v.parse().map_err(|_| num())?,
                "levels" | "j" => cfg.levels = v.parse().map_err(|_| num())?,
                "c_z" => cfg.c_z = v.parse().map_err(|_| num())?,
                "c_hidden" => cfg.c_hidden = v.parse().map_err(|_| num())?,
                "depth" => cfg.depth = v.parse().map_err(|_| num())?,
                "noise_width" => cfg.noise_width = v.parse().map_err(|_| num())?,
                "steps" => opts.steps = v.parse().map_err(|_| num())?,
                "batch_size" => opts.batch_size = v.parse().map_err(|_| num())?,
                "lr" => opts.lr = v.parse().map_err(|_| num())?,
                "seed" => opts.seed = v.parse().map_err(|_| num())?,
                "log_every" => opts.log_every = v.parse().map_err(|_| num())?,
                _ => return Err(err("unknown key")),
            }
        }
        cfg.validate()?;
        if opts.batch_size == 0 || !(opts.lr.is_finite() && opts.lr > 0.0) {
            return Err(CodecError::Config("batch_size and lr must be positive".into()));
        }
        Ok((cfg, opts))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let kind = match self.kind {
            Kind::OneD => "1d",
            Kind::TwoD => "2d",
        };
        let _ = writeln!(s, "kind = {kind}");
        let _ = writeln!(s, "c_x = {}", self.c_x);
        let _ = writeln!(s, "levels = {}", self.levels);
        let _ = writeln!(s, "c_z = {}", self.c_z);
        let _ = writeln!(s, "c_hidden = {}", self.c_hidden);
        let _ = writeln!(s, "depth = {}", self.depth);
        let _ = writeln!(s, "noise_width = {}", self.noise_width);
        s
    }
}
