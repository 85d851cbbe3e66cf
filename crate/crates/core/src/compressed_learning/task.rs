use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex32;

use super::reference::{spectral_features, LogisticRegression};
use super::LearnError;
use crate::datasets::{fft2, synth_image, SynthImageParams};
use crate::metrics::resize;
use crate::signal::Signal;

/// Two classes of RGB images over a shared random background: class 0 adds
/// fine texture oriented within `spread_deg` of horizontal stripes, class 1
/// adds isotropic texture in the same frequency band and at the same power.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub seed: u64,
    /// Total images, split evenly between the classes.
    pub samples: usize,
    pub height: usize,
    pub width: usize,
    /// Texture band in cycles per pixel.
    pub band: (f32, f32),
    pub spread_deg: f32,
    /// RMS of the texture.
    pub amplitude: f32,
    /// Gain on the background image.
    pub background: f32,
    /// Fraction of the samples used for training; the rest are held out.
    pub train_fraction: f64,
}

impl Default for TaskSpec {
    fn default() -> Self {
        TaskSpec {
            seed: 0,
            samples: 600,
            height: 64,
            width: 64,
            band: (0.25, 0.35),
            spread_deg: 20.0,
            amplitude: 0.2,
            background: 0.6,
            train_fraction: 0.75,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledSet {
    pub images: Vec<Signal<f32>>,
    pub labels: Vec<usize>,
}

impl LabeledSet {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

/// Two-fold cross-validated accuracies of the spectral reference classifier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    pub full_resolution: f64,
    pub downsampled_8x: f64,
}

#[derive(Clone, Debug)]
pub struct TextureTask {
    pub spec: TaskSpec,
    pub train: LabeledSet,
    pub test: LabeledSet,
    pub calibration: Calibration,
}

impl TextureTask {
    pub fn classes(&self) -> usize {
        2
    }
}

fn band_texture(spec: &TaskSpec, oriented: bool, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let (h, w) = (spec.height, spec.width);
    let spread = spec.spread_deg.to_radians();
    let mut buf: Vec<Complex32> = (0..h * w)
        .map(|i| {
            let (y, x) = (i / w, i % w);
            let fy = if y <= h / 2 { y as f32 } else { y as f32 - h as f32 } / h as f32;
            let fx = if x <= w / 2 { x as f32 } else { x as f32 - w as f32 } / w as f32;
            let f = (fx * fx + fy * fy).sqrt();
            // Angle of the frequency vector away from the vertical axis.
            let off = fx.abs().atan2(fy.abs());
            let keep = f >= spec.band.0 && f <= spec.band.1 && (!oriented || off <= spread);
            let re: f32 = StandardNormal.sample(rng);
            let im: f32 = StandardNormal.sample(rng);
            if keep {
                Complex32::new(re, im)
            } else {
                Complex32::new(0.0, 0.0)
            }
        })
        .collect();
    fft2(&mut buf, h, w, true);
    let re: Vec<f32> = buf.iter().map(|c| c.re).collect();
    let rms = (re.iter().map(|v| v * v).sum::<f32>() / re.len() as f32).sqrt().max(1e-12);
    re.into_iter().map(|v| v * spec.amplitude / rms).collect()
}

fn validate(spec: &TaskSpec) -> Result<(), LearnError> {
    if spec.samples < 8 || spec.samples % 2 != 0 {
        return Err(LearnError::Spec(format!("samples must be even and at least 8, got {}", spec.samples)));
    }
    if spec.height < 16 || spec.width < 16 {
        return Err(LearnError::Spec("images must be at least 16x16".into()));
    }
    let (lo, hi) = spec.band;
    if !(0.0 < lo && lo < hi && hi <= 0.5) {
        return Err(LearnError::Spec(format!("band {lo}..{hi} must lie inside (0, 0.5]")));
    }
    if !(0.0..1.0).contains(&spec.train_fraction) || spec.train_fraction == 0.0 {
        return Err(LearnError::Spec("train fraction must lie in (0, 1)".into()));
    }
    Ok(())
}

fn image(spec: &TaskSpec, label: usize, rng: &mut ChaCha8Rng) -> Signal<f32> {
    let params = SynthImageParams {
        height: spec.height,
        width: spec.width,
        ..Default::default()
    };
    let bg = synth_image(&params, rng.random());
    let tex = band_texture(spec, label == 0, rng);
    let plane = spec.height * spec.width;
    let data = bg
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| (spec.background * v + tex[i % plane]).clamp(-1.0, 1.0))
        .collect();
    Signal::new(3, &[spec.height, spec.width], data).expect("task image shape is valid")
}

fn cross_validated(features: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = features.len();
    let half = n / 2;
    let mut correct = 0usize;
    for (train, test) in [(0..half, half..n), (half..n, 0..half)] {
        let model = LogisticRegression::fit(&features[train.clone()], &labels[train]);
        correct += test.filter(|&i| model.predict(&features[i]) == labels[i]).count();
    }
    correct as f64 / n as f64
}

/// Generates a balanced labeled dataset and checks that the spectral
/// reference classifier separates the classes at full resolution but not
/// after 8x downsampling.
pub fn gen_texture_task(spec: &TaskSpec) -> Result<TextureTask, LearnError> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x7e47_0000);
    let n = spec.samples;
    // Labels alternate so every prefix of even length is balanced.
    let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let images: Vec<Signal<f32>> = labels.iter().map(|&l| image(spec, l, &mut rng)).collect();

    let small = [spec.height / 8, spec.width / 8];
    let full: Vec<Vec<f64>> = images.iter().map(spectral_features).collect();
    let down: Vec<Vec<f64>> = images.iter().map(|x| spectral_features(&resize(x, &small))).collect();
    let calibration = Calibration {
        full_resolution: cross_validated(&full, &labels),
        downsampled_8x: cross_validated(&down, &labels),
    };
    if calibration.full_resolution < 0.9 || calibration.downsampled_8x > 0.6 {
        return Err(LearnError::Calibration {
            full: calibration.full_resolution,
            downsampled: calibration.downsampled_8x,
        });
    }

    let n_train = ((n as f64 * spec.train_fraction).round() as usize / 2 * 2).clamp(2, n - 2);
    let mut images = images;
    let test_images = images.split_off(n_train);
    Ok(TextureTask {
        spec: spec.clone(),
        train: LabeledSet {
            images,
            labels: labels[..n_train].to_vec(),
        },
        test: LabeledSet {
            images: test_images,
            labels: labels[n_train..].to_vec(),
        },
        calibration,
    })
}
