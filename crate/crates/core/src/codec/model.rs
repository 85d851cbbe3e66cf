use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::companding::quantize_value;
use super::{CodecConfig, CodecError, QuantizedLatent};
use crate::diffcore::{ops, ConvParams, DenseParams, DiffError, ResidualBlock, Scalar, Tape, Tensor, Var};
use crate::signal::Signal;
use crate::wavelet::{self, FilterBank, SubbandTensor};

/// Learnable tensors of a codec, generic so the training graph can also be
/// evaluated in double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub analysis: DenseParams<T>,
    pub log_scales: Tensor<T>,
    pub entry: ConvParams<T>,
    pub blocks: Vec<ResidualBlock<T>>,
    pub exit: ConvParams<T>,
}

impl<T: Scalar> ModelParams<T> {
    pub fn init(cfg: &CodecConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = cfg.kind.dims();
        let c_sub = cfg.subband_channels();
        ModelParams {
            analysis: DenseParams::init(c_sub, cfg.c_z, &mut rng),
            log_scales: Tensor::zeros(&[cfg.c_z]),
            entry: ConvParams::init(cfg.c_z, cfg.c_hidden, 1, dims, &mut rng),
            blocks: (0..cfg.depth).map(|_| ResidualBlock::init(cfg.c_hidden, dims, &mut rng)).collect(),
            exit: ConvParams::zeros(cfg.c_hidden, c_sub, 1, dims),
        }
    }

    /// All-zero tensors with the shapes `cfg` requires.
    pub fn zeros(cfg: &CodecConfig) -> Self {
        let dims = cfg.kind.dims();
        let c_sub = cfg.subband_channels();
        ModelParams {
            analysis: DenseParams::zeros(c_sub, cfg.c_z),
            log_scales: Tensor::zeros(&[cfg.c_z]),
            entry: ConvParams::zeros(cfg.c_z, cfg.c_hidden, 1, dims),
            blocks: (0..cfg.depth)
                .map(|_| ResidualBlock {
                    conv1: ConvParams::zeros(cfg.c_hidden, cfg.c_hidden, 3, dims),
                    conv2: ConvParams::zeros(cfg.c_hidden, cfg.c_hidden, 3, dims),
                })
                .collect(),
            exit: ConvParams::zeros(cfg.c_hidden, c_sub, 1, dims),
        }
    }

    /// Canonical tensor names, in the order of [`ModelParams::tensors`].
    pub fn names(depth: usize) -> Vec<String> {
        let mut v: Vec<String> = ["analysis.weight", "analysis.bias", "compand.log_scale", "entry.weight", "entry.bias"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        for i in 0..depth {
            for part in ["conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias"] {
                v.push(format!("blocks.{i}.{part}"));
            }
        }
        v.push("exit.weight".into());
        v.push("exit.bias".into());
        v
    }

    pub fn tensors(&self) -> Vec<&Tensor<T>> {
        let mut v = vec![
            &self.analysis.weight,
            &self.analysis.bias,
            &self.log_scales,
            &self.entry.weight,
            &self.entry.bias,
        ];
        for b in &self.blocks {
            v.extend([&b.conv1.weight, &b.conv1.bias, &b.conv2.weight, &b.conv2.bias]);
        }
        v.extend([&self.exit.weight, &self.exit.bias]);
        v
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor<T>> {
        let mut v: Vec<&mut Tensor<T>> = Vec::new();
        v.extend(self.analysis.tensors_mut());
        v.push(&mut self.log_scales);
        v.extend(self.entry.tensors_mut());
        for b in &mut self.blocks {
            v.extend(b.tensors_mut());
        }
        v.extend(self.exit.tensors_mut());
        v
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.numel()).sum()
    }

    pub fn cast<U: Scalar>(&self) -> ModelParams<U> {
        let d = |p: &DenseParams<T>| DenseParams {
            weight: p.weight.cast(),
            bias: p.bias.cast(),
        };
        let c = |p: &ConvParams<T>| ConvParams {
            weight: p.weight.cast(),
            bias: p.bias.cast(),
        };
        ModelParams {
            analysis: d(&self.analysis),
            log_scales: self.log_scales.cast(),
            entry: c(&self.entry),
            blocks: self
                .blocks
                .iter()
                .map(|b| ResidualBlock {
                    conv1: c(&b.conv1),
                    conv2: c(&b.conv2),
                })
                .collect(),
            exit: c(&self.exit),
        }
    }

    /// Places every tensor on the tape, in canonical order.
    pub fn bind(&self, tape: &mut Tape<T>) -> Vec<Var> {
        self.tensors().into_iter().map(|t| tape.leaf(t.clone())).collect()
    }
}

/// Records the training forward pass: wavelet transform, analysis, compand,
/// additive noise, decompand, synthesis and inverse transform. `vars` are the
/// parameter leaves in canonical order; `noise` is the sampled bottleneck
/// noise in the companded domain, or `None` for a noise-free pass.
pub fn training_graph<T: Scalar>(
    tape: &mut Tape<T>,
    cfg: &CodecConfig,
    vars: &[Var],
    x: Var,
    noise: Option<&Tensor<T>>,
) -> Result<Var, DiffError> {
    let sub = tape.wpt(x, cfg.levels)?;
    let z = tape.dense(sub, vars[0], vars[1])?;
    let y = tape.compand(z, vars[2])?;
    let y = match noise {
        Some(n) => tape.add_const(y, n)?,
        None => y,
    };
    let zh = tape.decompand(y, vars[2])?;
    let mut h = tape.conv(zh, vars[3], vars[4])?;
    for i in 0..cfg.depth {
        let v = &vars[5 + 4 * i..9 + 4 * i];
        let a = tape.conv(h, v[0], v[1])?;
        let a = tape.silu(a)?;
        let a = tape.conv(a, v[2], v[3])?;
        h = tape.add(h, a)?;
    }
    let n = vars.len();
    let out = tape.conv(h, vars[n - 2], vars[n - 1])?;
    tape.iwpt(out, cfg.levels)
}

/// A trained or freshly initialised codec.
#[derive(Clone, Debug, PartialEq)]
pub struct CodecModel {
    pub config: CodecConfig,
    pub params: ModelParams<f32>,
    fb: FilterBank,
}

fn to_tensor(s: &Signal<f32>) -> Tensor<f32> {
    Tensor::from_signal(s)
}

impl CodecModel {
    pub fn new(config: CodecConfig, seed: u64) -> Result<Self, CodecError> {
        config.validate()?;
        let params = ModelParams::init(&config, seed);
        Ok(CodecModel {
            config,
            params,
            fb: wavelet::make_cdf97_filterbank(),
        })
    }

    pub fn from_params(config: CodecConfig, params: ModelParams<f32>) -> Result<Self, CodecError> {
        config.validate()?;
        let expect = ModelParams::<f32>::zeros(&config);
        let shapes_match = params.blocks.len() == config.depth
            && expect.tensors().iter().zip(params.tensors()).all(|(a, b)| a.shape() == b.shape());
        if !shapes_match {
            return Err(CodecError::Config("parameter shapes do not match the config".into()));
        }
        Ok(CodecModel {
            config,
            params,
            fb: wavelet::make_cdf97_filterbank(),
        })
    }

    pub fn filterbank(&self) -> &FilterBank {
        &self.fb
    }

    /// Per-channel compander scales.
    pub fn scales(&self) -> Vec<f32> {
        self.params.log_scales.data().iter().map(|v| v.exp()).collect()
    }

    fn check_signal(&self, x: &Signal<f32>) -> Result<(), CodecError> {
        if x.kind() != self.config.kind || x.channels() != self.config.c_x {
            return Err(CodecError::Shape(format!(
                "model expects {:?} input with {} channels, got {:?} with {}",
                self.config.kind,
                self.config.c_x,
                x.kind(),
                x.channels()
            )));
        }
        Ok(())
    }

    fn check_latent(&self, channels: usize, extents: &[usize]) -> Result<(), CodecError> {
        if channels != self.config.c_z || extents.len() != self.config.kind.dims() {
            return Err(CodecError::Shape(format!(
                "model expects {} latent channels over {} axes, got {channels} over {}",
                self.config.c_z,
                self.config.kind.dims(),
                extents.len()
            )));
        }
        Ok(())
    }

    /// Linear encoder: wavelet packet transform then the analysis projection.
    pub fn analyze(&self, x: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        self.check_signal(x)?;
        let sb = wavelet::wpt_forward(x, self.config.levels, &self.fb)?;
        let z = self.params.analysis.forward(&to_tensor(sb.coeffs()))?;
        Ok(z.to_signal())
    }

    pub fn compand(&self, z: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        self.check_latent(z.channels(), z.extents())?;
        Ok(ops::compand_forward(&to_tensor(z), &self.params.log_scales)?.to_signal())
    }

    pub fn decompand(&self, y: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        self.check_latent(y.channels(), y.extents())?;
        Ok(ops::decompand_forward(&to_tensor(y), &self.params.log_scales)?.to_signal())
    }

    /// Decoder: residual CNN then the inverse wavelet packet transform.
    pub fn synthesize(&self, z: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        self.check_latent(z.channels(), z.extents())?;
        let mut h = self.params.entry.forward(&to_tensor(z))?;
        for b in &self.params.blocks {
            h = b.forward(&h)?;
        }
        let out = self.params.exit.forward(&h)?;
        let sb = SubbandTensor::new(out.to_signal(), self.config.levels)?;
        Ok(wavelet::wpt_inverse(&sb, &self.fb))
    }

    /// Analysis, companding and rounding.
    pub fn encode_latent(&self, x: &Signal<f32>) -> Result<QuantizedLatent, CodecError> {
        let y = self.compand(&self.analyze(x)?)?;
        Ok(QuantizedLatent::quantize(&y))
    }

    pub fn decode_latent(&self, q: &QuantizedLatent) -> Result<Signal<f32>, CodecError> {
        self.synthesize(&self.decompand(&q.to_signal())?)
    }

    /// Reconstruction through the codec without rounding the latent.
    pub fn reconstruct_continuous(&self, x: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        self.synthesize(&self.decompand(&self.compand(&self.analyze(x)?)?)?)
    }

    pub fn reconstruct_quantized(&self, x: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        self.decode_latent(&self.encode_latent(x)?)
    }

    /// Decodes, for every latent channel, a 3-position latent (3x3 in 2D)
    /// that is zero except for `amplitude` at the centre of that channel.
    pub fn probe_basis(&self, amplitude: i8) -> Result<Vec<Signal<f32>>, CodecError> {
        let dims = self.config.kind.dims();
        let extents = vec![3; dims];
        let plane = 3usize.pow(dims as u32);
        (0..self.config.c_z)
            .map(|c| {
                let mut data = vec![0i8; self.config.c_z * plane];
                data[c * plane + plane / 2] = amplitude;
                let q = QuantizedLatent::new(self.config.c_z, &extents, data)?;
                self.decode_latent(&q)
            })
            .collect()
    }
}

impl QuantizedLatent {
    /// Rounds half away from zero and clamps to `[-127, 127]`.
    pub fn quantize(y: &Signal<f32>) -> QuantizedLatent {
        let data = y.data().iter().map(|&v| quantize_value(v as f64)).collect();
        QuantizedLatent::new(y.channels(), y.extents(), data).expect("shape comes from a valid signal")
    }
}

/// Companded latent plus uniform noise, the training stand-in for rounding.
pub fn bottleneck_noise<R: rand::Rng + ?Sized>(shape: &[usize], width: f32, rng: &mut R) -> Tensor<f32> {
    let half = 0.5 * width as f64;
    Tensor::from_fn(shape, |_| if half > 0.0 { rng.random_range(-half..=half) as f32 } else { 0.0 })
}

