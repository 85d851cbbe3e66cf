use std::time::Instant;

use super::classifier::{ClassifierConfig, ConvClassifier};
use super::task::TextureTask;
use super::LearnError;
use crate::codec::CodecModel;
use crate::metrics::{resize, Record};
use crate::signal::Signal;

#[derive(Clone, Copy, Debug)]
pub enum FeatureMode<'a> {
    /// Companded analysis output, before rounding.
    Latent(&'a CodecModel),
    /// Antialiased bicubic reduction by an integer factor per axis.
    Downsample(usize),
    Identity,
}

impl FeatureMode<'_> {
    pub fn name(&self) -> String {
        match self {
            FeatureMode::Latent(m) => format!("latent-{}x", fmt_ratio(m.config.dimensionality_reduction())),
            FeatureMode::Downsample(f) => format!("downsample-{f}x"),
            FeatureMode::Identity => "identity".into(),
        }
    }
}

fn fmt_ratio(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r:.2}")
    }
}

pub fn featurize(images: &[Signal<f32>], mode: FeatureMode<'_>) -> Result<Vec<Signal<f32>>, LearnError> {
    images
        .iter()
        .map(|x| match mode {
            FeatureMode::Latent(m) => Ok(m.compand(&m.analyze(x)?)?),
            FeatureMode::Downsample(f) => {
                let small: Vec<usize> = x.extents().iter().map(|&e| (e / f).max(1)).collect();
                Ok(resize(x, &small))
            }
            FeatureMode::Identity => Ok(x.clone()),
        })
        .collect()
}

fn within_one_percent(a: usize, b: usize) -> bool {
    a.abs_diff(b) * 100 <= a.max(b)
}

/// The integer downsampling factor whose output has `target` elements,
/// within 1%.
pub fn match_downsample_factor(channels: usize, extents: &[usize], target: usize) -> Result<usize, LearnError> {
    let max = extents.iter().copied().max().unwrap_or(1);
    (1..=max)
        .find(|&f| within_one_percent(channels * extents.iter().map(|&e| (e / f).max(1)).product::<usize>(), target))
        .ok_or_else(|| LearnError::NoMatchingFactor {
            extents: extents.to_vec(),
            target,
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub representation: String,
    pub dimension: usize,
    pub accuracy: f64,
    pub train_seconds: f64,
    pub infer_seconds: f64,
}

impl ComparisonReport {
    pub fn record(&self, seed: u64) -> Record {
        Record::new("comparison")
            .field("seed", seed)
            .field("representation", &self.representation)
            .field("dim", self.dimension)
            .num("accuracy", self.accuracy, 4)
            .num("train_s", self.train_seconds, 3)
            .num("infer_s", self.infer_seconds, 3)
    }
}

fn evaluate(task: &TextureTask, mode: FeatureMode<'_>, cfg: &ClassifierConfig) -> Result<(ComparisonReport, usize), LearnError> {
    let train = featurize(&task.train.images, mode)?;
    let model = ConvClassifier::train(&train, &task.train.labels, task.classes(), cfg)?;
    let start = Instant::now();
    let test = featurize(&task.test.images, mode)?;
    let accuracy = model.accuracy(&test, &task.test.labels)?;
    let dimension = train[0].len();
    Ok((
        ComparisonReport {
            representation: mode.name(),
            dimension,
            accuracy,
            train_seconds: model.train_seconds,
            infer_seconds: start.elapsed().as_secs_f64(),
        },
        dimension,
    ))
}

/// Trains the same classifier on codec latents and on downsampled pixels of
/// matching dimension. Returns `[latent, downsample]`.
pub fn run_comparison(
    task: &TextureTask,
    model: &CodecModel,
    cfg: &ClassifierConfig,
    seed: u64,
) -> Result<[ComparisonReport; 2], LearnError> {
    let cfg = ClassifierConfig { seed, ..cfg.clone() };
    let probe = &task.train.images[0];
    let latent_dim = model.analyze(probe)?.len();
    let factor = match_downsample_factor(probe.channels(), probe.extents(), latent_dim)?;
    let (latent, a) = evaluate(task, FeatureMode::Latent(model), &cfg)?;
    let (down, b) = evaluate(task, FeatureMode::Downsample(factor), &cfg)?;
    if !within_one_percent(a, b) {
        return Err(LearnError::DimensionMismatch(a, b));
    }
    if latent.accuracy <= 0.55 && down.accuracy <= 0.55 {
        return Err(LearnError::Inconclusive {
            latent: latent.accuracy,
            downsampled: down.accuracy,
        });
    }
    Ok([latent, down])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::CodecConfig;

    #[test]
    fn dimensions_match_for_the_16x_codec() {
        let model = CodecModel::new(CodecConfig::image_16x(), 0).unwrap();
        let x = Signal::new(3, &[64, 64], vec![0.1; 3 * 64 * 64]).unwrap();
        let z = featurize(std::slice::from_ref(&x), FeatureMode::Latent(&model)).unwrap();
        assert_eq!((z[0].channels(), z[0].extents()), (12, &[8usize, 8][..]));
        assert_eq!(z[0].len(), 768);
        assert_eq!(match_downsample_factor(3, &[64, 64], 768).unwrap(), 4);
        let d = featurize(std::slice::from_ref(&x), FeatureMode::Downsample(4)).unwrap();
        assert_eq!(d[0].len(), 768);
        assert_eq!(featurize(std::slice::from_ref(&x), FeatureMode::Identity).unwrap()[0].len(), 12_288);
        assert_eq!(FeatureMode::Latent(&model).name(), "latent-16x");
        assert!(match_downsample_factor(3, &[64, 64], 1000).is_err());
    }
}
