//! Antialiased bicubic resampling with the weight layout used by Pillow.

use crate::signal::Signal;

const A: f64 = -0.5;

fn cubic(x: f64) -> f64 {
    let x = x.abs();
    if x < 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        (((x - 5.0) * x + 8.0) * x - 4.0) * A
    } else {
        0.0
    }
}

/// For every output index: first input index and normalised tap weights.
fn coeffs(input: usize, output: usize) -> Vec<(usize, Vec<f64>)> {
    let scale = input as f64 / output as f64;
    let fscale = scale.max(1.0);
    let support = 2.0 * fscale;
    (0..output)
        .map(|i| {
            let center = (i as f64 + 0.5) * scale;
            let lo = ((center - support + 0.5).floor().max(0.0)) as usize;
            let hi = ((center + support + 0.5).floor() as usize).min(input);
            let mut w: Vec<f64> = (lo..hi).map(|x| cubic((x as f64 - center + 0.5) / fscale)).collect();
            let s: f64 = w.iter().sum();
            if s != 0.0 {
                w.iter_mut().for_each(|v| *v /= s);
            }
            (lo, w)
        })
        .collect()
}

/// Resamples one axis of a `outer x n x inner` array to `m`.
fn resample_axis(x: &[f64], outer: usize, n: usize, inner: usize, m: usize) -> Vec<f64> {
    let taps = coeffs(n, m);
    let mut out = vec![0.0; outer * m * inner];
    for o in 0..outer {
        for (j, (lo, w)) in taps.iter().enumerate() {
            let dst = &mut out[(o * m + j) * inner..(o * m + j + 1) * inner];
            for (k, &wk) in w.iter().enumerate() {
                let src = &x[(o * n + lo + k) * inner..(o * n + lo + k + 1) * inner];
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d += wk * s;
                }
            }
        }
    }
    out
}

/// Separable bicubic resize of every channel to `extents`.
pub fn resize(x: &Signal<f32>, extents: &[usize]) -> Signal<f32> {
    assert_eq!(extents.len(), x.extents().len(), "resize keeps the number of axes");
    let mut cur: Vec<f64> = x.data().iter().map(|&v| v as f64).collect();
    let mut shape = vec![x.channels()];
    shape.extend_from_slice(x.extents());
    for axis in 1..shape.len() {
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        cur = resample_axis(&cur, outer, shape[axis], inner, extents[axis - 1]);
        shape[axis] = extents[axis - 1];
    }
    Signal::new(x.channels(), extents, cur.into_iter().map(|v| v as f32).collect()).expect("extents are non-empty")
}

/// Downsamples every axis by `factor` and resizes back: the resolution
/// reduction baseline at `factor^d` dimensionality reduction.
pub fn bicubic_baseline(x: &Signal<f32>, factor: usize) -> Signal<f32> {
    let small: Vec<usize> = x.extents().iter().map(|&e| (e / factor).max(1)).collect();
    resize(&resize(x, &small), x.extents())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(cubic(0.0), 1.0);
        assert_eq!(cubic(1.0), 0.0);
        assert_eq!(cubic(2.0), 0.0);
        assert!((cubic(0.5) - 0.5625).abs() < 1e-12);
        assert!((cubic(1.5) + 0.0625).abs() < 1e-12);
    }

    #[test]
    fn constant_is_preserved() {
        let x = Signal::new(2, &[9, 14], vec![0.3f32; 2 * 9 * 14]).unwrap();
        for ext in [[3usize, 5], [18, 28], [9, 14]] {
            let y = resize(&x, &ext);
            assert!(y.data().iter().all(|v| (v - 0.3).abs() < 1e-6));
        }
    }

    #[test]
    fn identity_size_is_identity() {
        let x = Signal::new(1, &[5, 6], (0..30).map(|i| (i as f32 * 0.7).sin()).collect()).unwrap();
        let y = resize(&x, &[5, 6]);
        for (a, b) in x.data().iter().zip(y.data()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn halving_matches_pillow_weights() {
        // Pillow's 2x reduction uses 8 taps with these weights in the interior.
        let t = coeffs(16, 8);
        let (lo, w) = &t[3];
        assert_eq!(*lo, 3);
        let expect = [-0.0234375, -0.0703125, 0.2265625, 0.8671875, 0.8671875, 0.2265625, -0.0703125, -0.0234375];
        let s: f64 = expect.iter().sum();
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b / s).abs() < 1e-12);
        }
    }
}
