use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::diffcore::{ops, Adam, ConvParams, DenseParams, DiffError, Tape, Tensor};
use crate::signal::Signal;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            hidden: 16,
            epochs: 30,
            batch_size: 16,
            lr: 3e-3,
            seed: 0,
        }
    }
}

/// Two 3-wide convolutions with SiLU, global mean pooling and a dense
/// layer, on inputs standardised per channel with training statistics.
#[derive(Clone, Debug)]
pub struct ConvClassifier {
    conv1: ConvParams<f32>,
    conv2: ConvParams<f32>,
    head: DenseParams<f32>,
    mean: Vec<f32>,
    inv_std: Vec<f32>,
    /// Wall time spent in `train`.
    pub train_seconds: f64,
}

fn channel_stats(xs: &[Signal<f32>]) -> (Vec<f32>, Vec<f32>) {
    let c = xs[0].channels();
    let mut mean = vec![0.0f64; c];
    let mut sq = vec![0.0f64; c];
    let mut n = 0.0f64;
    for x in xs {
        for (ch, (m, s)) in mean.iter_mut().zip(&mut sq).enumerate() {
            for &v in x.channel(ch) {
                *m += v as f64;
                *s += (v as f64) * (v as f64);
            }
        }
        n += x.plane_len() as f64;
    }
    let mean: Vec<f64> = mean.iter().map(|m| m / n).collect();
    let inv: Vec<f32> = sq
        .iter()
        .zip(&mean)
        .map(|(s, m)| (1.0 / (s / n - m * m).max(0.0).sqrt().max(1e-6)) as f32)
        .collect();
    (mean.into_iter().map(|m| m as f32).collect(), inv)
}

impl ConvClassifier {
    pub fn train(xs: &[Signal<f32>], labels: &[usize], classes: usize, cfg: &ClassifierConfig) -> Result<Self, DiffError> {
        assert_eq!(xs.len(), labels.len());
        assert!(!xs.is_empty(), "no training data");
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let dims = xs[0].extents().len();
        let (mean, inv_std) = channel_stats(xs);
        let mut model = ConvClassifier {
            conv1: ConvParams::init(xs[0].channels(), cfg.hidden, 3, dims, &mut rng),
            conv2: ConvParams::init(cfg.hidden, cfg.hidden, 3, dims, &mut rng),
            head: DenseParams::init(cfg.hidden, classes, &mut rng),
            mean,
            inv_std,
            train_seconds: 0.0,
        };
        let inputs: Vec<Tensor<f32>> = xs.iter().map(|x| model.standardize(x)).collect();
        let mut adam = Adam::new(cfg.lr);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(cfg.batch_size.max(1)) {
                let mut grads: Vec<Tensor<f32>> = model.tensors().iter().map(|t| Tensor::zeros(t.shape())).collect();
                for &i in batch {
                    let mut tape = Tape::new();
                    let c1 = model.conv1.bind(&mut tape);
                    let c2 = model.conv2.bind(&mut tape);
                    let hd = model.head.bind(&mut tape);
                    let x = tape.leaf(inputs[i].clone());
                    let h = c1.apply(&mut tape, x)?;
                    let h = tape.silu(h)?;
                    let h = c2.apply(&mut tape, h)?;
                    let h = tape.silu(h)?;
                    let h = tape.mean_pool(h)?;
                    let logits = hd.apply(&mut tape, h)?;
                    let loss = tape.cross_entropy(logits, labels[i])?;
                    let g = tape.backward(loss)?;
                    let vars = [c1.vars(), c2.vars(), hd.vars()].concat();
                    for (acc, v) in grads.iter_mut().zip(vars) {
                        if let Some(gv) = g.get(v) {
                            acc.add_assign(gv);
                        }
                    }
                }
                grads.iter_mut().for_each(|g| g.scale(1.0 / batch.len() as f32));
                let mut params: Vec<&mut Tensor<f32>> = model.tensors_mut();
                adam.step(&mut params, &grads)?;
            }
        }
        model.train_seconds = start.elapsed().as_secs_f64();
        Ok(model)
    }

    fn tensors(&self) -> Vec<&Tensor<f32>> {
        vec![
            &self.conv1.weight,
            &self.conv1.bias,
            &self.conv2.weight,
            &self.conv2.bias,
            &self.head.weight,
            &self.head.bias,
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor<f32>> {
        let [a, b] = self.conv1.tensors_mut();
        let [c, d] = self.conv2.tensors_mut();
        let [e, f] = self.head.tensors_mut();
        vec![a, b, c, d, e, f]
    }

    fn standardize(&self, x: &Signal<f32>) -> Tensor<f32> {
        let mut t = Tensor::from_signal(x);
        let p = x.plane_len();
        for (c, chunk) in t.data_mut().chunks_mut(p).enumerate() {
            let (m, s) = (self.mean[c], self.inv_std[c]);
            chunk.iter_mut().for_each(|v| *v = (*v - m) * s);
        }
        t
    }

    pub fn logits(&self, x: &Signal<f32>) -> Result<Vec<f32>, DiffError> {
        let h = self.conv1.forward(&self.standardize(x))?;
        let h = self.conv2.forward(&ops::silu_forward(&h))?;
        let h = ops::mean_pool(&ops::silu_forward(&h));
        Ok(self.head.forward(&h)?.into_data())
    }

    pub fn predict(&self, x: &Signal<f32>) -> Result<usize, DiffError> {
        let l = self.logits(x)?;
        Ok((0..l.len()).max_by(|&a, &b| l[a].total_cmp(&l[b])).unwrap_or(0))
    }

    pub fn accuracy(&self, xs: &[Signal<f32>], labels: &[usize]) -> Result<f64, DiffError> {
        let mut correct = 0usize;
        for (x, &y) in xs.iter().zip(labels) {
            correct += usize::from(self.predict(x)? == y);
        }
        Ok(correct as f64 / xs.len().max(1) as f64)
    }
}
