use rustfft::num_complex::Complex32;

use crate::datasets::fft2;
use crate::signal::Signal;

const RADIAL_EDGES: [f64; 8] = [0.0, 0.0625, 0.125, 0.1875, 0.25, 0.3125, 0.375, 0.75];
const ANGLES: usize = 4;

/// Log mean power of the luminance spectrum in polar bins: seven radial
/// bands (cycles per pixel) by four orientations. Empty bins read as zero.
pub fn spectral_features(x: &Signal<f32>) -> Vec<f64> {
    let (h, w) = match x.extents() {
        [h, w] => (*h, *w),
        [n] => (1, *n),
        _ => unreachable!("signals have one or two axes"),
    };
    let plane = h * w;
    let mut lum: Vec<f32> = (0..plane)
        .map(|i| (0..x.channels()).map(|c| x.channel(c)[i]).sum::<f32>() / x.channels() as f32)
        .collect();
    let mean = lum.iter().sum::<f32>() / plane as f32;
    lum.iter_mut().for_each(|v| *v -= mean);
    let mut buf: Vec<Complex32> = lum.iter().map(|&v| Complex32::new(v, 0.0)).collect();
    fft2(&mut buf, h, w, false);
    let bins = (RADIAL_EDGES.len() - 1) * ANGLES;
    let mut sum = vec![0.0f64; bins];
    let mut count = vec![0usize; bins];
    for y in 0..h {
        let fy = if y <= h / 2 { y as f64 } else { y as f64 - h as f64 } / h as f64;
        for xx in 0..w {
            let fx = if xx <= w / 2 { xx as f64 } else { xx as f64 - w as f64 } / w as f64;
            let f = (fx * fx + fy * fy).sqrt();
            if f == 0.0 {
                continue;
            }
            let Some(r) = RADIAL_EDGES.windows(2).position(|e| f >= e[0] && f < e[1]) else {
                continue;
            };
            let theta = fy.atan2(fx).rem_euclid(std::f64::consts::PI);
            let a = ((theta / std::f64::consts::PI * ANGLES as f64) as usize).min(ANGLES - 1);
            sum[r * ANGLES + a] += buf[y * w + xx].norm_sqr() as f64 / plane as f64;
            count[r * ANGLES + a] += 1;
        }
    }
    sum.iter()
        .zip(&count)
        .map(|(s, &c)| if c == 0 { 0.0 } else { (s / c as f64 + 1e-8).ln() })
        .collect()
}

/// Binary logistic regression on standardised features, fitted by
/// full-batch gradient descent with a small L2 penalty.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticRegression {
    mean: Vec<f64>,
    scale: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
}

impl LogisticRegression {
    pub fn fit(features: &[Vec<f64>], labels: &[usize]) -> Self {
        assert_eq!(features.len(), labels.len());
        assert!(!features.is_empty(), "no training data");
        let n = features.len() as f64;
        let d = features[0].len();
        let mut mean = vec![0.0; d];
        for f in features {
            mean.iter_mut().zip(f).for_each(|(m, v)| *m += v / n);
        }
        let mut scale = vec![0.0; d];
        for f in features {
            scale.iter_mut().zip(f).zip(&mean).for_each(|((s, v), m)| *s += (v - m).powi(2) / n);
        }
        scale.iter_mut().for_each(|s| *s = 1.0 / s.sqrt().max(1e-9));
        let xs: Vec<Vec<f64>> = features
            .iter()
            .map(|f| f.iter().zip(&mean).zip(&scale).map(|((v, m), s)| (v - m) * s).collect())
            .collect();
        let (mut weights, mut bias) = (vec![0.0; d], 0.0);
        let (lr, l2) = (0.5, 1e-3);
        for _ in 0..500 {
            let mut gw = vec![0.0; d];
            let mut gb = 0.0;
            for (x, &y) in xs.iter().zip(labels) {
                let z = bias + x.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>();
                let err = 1.0 / (1.0 + (-z).exp()) - y as f64;
                gw.iter_mut().zip(x).for_each(|(g, v)| *g += err * v / n);
                gb += err / n;
            }
            weights.iter_mut().zip(&gw).for_each(|(w, g)| *w -= lr * (g + l2 * *w));
            bias -= lr * gb;
        }
        LogisticRegression { mean, scale, weights, bias }
    }

    /// Probability of class 1.
    pub fn probability(&self, features: &[f64]) -> f64 {
        let z = self.bias
            + features
                .iter()
                .zip(&self.mean)
                .zip(&self.scale)
                .zip(&self.weights)
                .map(|(((v, m), s), w)| (v - m) * s * w)
                .sum::<f64>();
        1.0 / (1.0 + (-z).exp())
    }

    pub fn predict(&self, features: &[f64]) -> usize {
        usize::from(self.probability(features) >= 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_data_is_learned() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let ys: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let m = LogisticRegression::fit(&xs, &ys);
        assert!(xs.iter().zip(&ys).all(|(x, &y)| m.predict(x) == y));
    }

    #[test]
    fn features_see_orientation() {
        let (h, w) = (32, 32);
        let stripes = Signal::new(1, &[h, w], (0..h * w).map(|i| ((i / w) as f32 * 2.0).sin()).collect()).unwrap();
        let f = spectral_features(&stripes);
        assert_eq!(f.len(), 28);
        // Energy at ~0.32 cycles/px along y sits in the vertical-frequency bin.
        let band = 5 * ANGLES;
        let best = (0..ANGLES).max_by(|&a, &b| f[band + a].total_cmp(&f[band + b])).unwrap();
        assert_eq!(best, 2);
    }
}
