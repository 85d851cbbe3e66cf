//! Synthetic stand-ins for natural images and music: dead-leaves occlusion
//! over a 1/f background with mostly shared colour, and decaying harmonic
//! tones.

use std::f32::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex32;
use rustfft::FftPlanner;

use crate::signal::Signal;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthImageParams {
    pub height: usize,
    pub width: usize,
    /// Shapes per 96x96 area.
    pub density: f32,
    /// Spread of per-shape colour offsets around the grey level.
    pub chroma: f32,
    /// Standard deviation of the 1/f luminance texture.
    pub texture: f32,
}

impl Default for SynthImageParams {
    fn default() -> Self {
        SynthImageParams {
            height: 96,
            width: 96,
            density: 60.0,
            chroma: 0.12,
            texture: 0.08,
        }
    }
}

/// In-place unnormalised 2D FFT of a row-major `h x w` buffer.
pub(crate) fn fft2(buf: &mut [Complex32], h: usize, w: usize, inverse: bool) {
    let mut planner = FftPlanner::<f32>::new();
    let (row, col) = if inverse {
        (planner.plan_fft_inverse(w), planner.plan_fft_inverse(h))
    } else {
        (planner.plan_fft_forward(w), planner.plan_fft_forward(h))
    };
    for r in buf.chunks_mut(w) {
        row.process(r);
    }
    let mut tmp = vec![Complex32::new(0.0, 0.0); h];
    for x in 0..w {
        for y in 0..h {
            tmp[y] = buf[y * w + x];
        }
        col.process(&mut tmp);
        for y in 0..h {
            buf[y * w + x] = tmp[y];
        }
    }
}

/// Zero-mean, unit-variance field with a `1/f` amplitude spectrum.
fn pink_field(h: usize, w: usize, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let mut buf: Vec<Complex32> = (0..h * w)
        .map(|i| {
            let (y, x) = (i / w, i % w);
            let fy = y.min(h - y) as f32 / h as f32;
            let fx = x.min(w - x) as f32 / w as f32;
            let f = (fx * fx + fy * fy).sqrt();
            if f == 0.0 {
                return Complex32::new(0.0, 0.0);
            }
            let phase = rng.random_range(0.0..2.0 * PI);
            Complex32::from_polar(1.0 / f, phase)
        })
        .collect();
    fft2(&mut buf, h, w, true);
    let re: Vec<f32> = buf.iter().map(|c| c.re).collect();
    let mean = re.iter().sum::<f32>() / re.len() as f32;
    let sd = (re.iter().map(|v| (v - mean).powi(2)).sum::<f32>() / re.len() as f32).sqrt().max(1e-12);
    re.into_iter().map(|v| (v - mean) / sd).collect()
}

/// An RGB image in `[-1, 1]`, deterministic in `seed`.
pub fn synth_image(p: &SynthImageParams, seed: u64) -> Signal<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Render at 2x and box-filter down for anti-aliased edges.
    let (h, w) = (2 * p.height, 2 * p.width);
    let mut rgb = vec![[0.0f32; 3]; h * w];
    let base: f32 = rng.random_range(-0.5..0.5);
    rgb.iter_mut().for_each(|v| *v = [base; 3]);
    let r_min = 2.0f32;
    let r_max = (h.min(w) as f32) / 3.0;
    let shapes = (p.density * (p.height * p.width) as f32 / (96.0 * 96.0)).round() as usize;
    for _ in 0..shapes {
        // Radius density proportional to r^-3 on [r_min, r_max].
        let u: f32 = rng.random();
        let r = (r_min.powi(-2) - u * (r_min.powi(-2) - r_max.powi(-2))).powf(-0.5);
        let (cy, cx) = (rng.random_range(0.0..h as f32), rng.random_range(0.0..w as f32));
        let grey: f32 = rng.random_range(-0.85..0.85);
        let tint = [rng.random_range(-p.chroma..=p.chroma), 0.0, rng.random_range(-p.chroma..=p.chroma)];
        let slope = (rng.random_range(-0.3..0.3) / r, rng.random_range(-0.3..0.3) / r);
        let rect = rng.random_bool(0.4);
        let angle: f32 = rng.random_range(0.0..PI);
        let aspect: f32 = rng.random_range(0.4..1.0);
        let (s, c) = angle.sin_cos();
        let y0 = (cy - r).floor().max(0.0) as usize;
        let y1 = ((cy + r).ceil() as usize).min(h);
        let x0 = (cx - r).floor().max(0.0) as usize;
        let x1 = ((cx + r).ceil() as usize).min(w);
        for y in y0..y1 {
            for x in x0..x1 {
                let (dy, dx) = (y as f32 + 0.5 - cy, x as f32 + 0.5 - cx);
                let (u, v) = (c * dx + s * dy, -s * dx + c * dy);
                let inside = if rect {
                    u.abs() <= r * 0.8 && v.abs() <= r * 0.8 * aspect
                } else {
                    (u * u + (v / aspect).powi(2)) <= r * r
                };
                if inside {
                    let g = grey + slope.0 * dy + slope.1 * dx;
                    rgb[y * w + x] = [g + tint[0], g + tint[1], g + tint[2]];
                }
            }
        }
    }
    let (oh, ow) = (p.height, p.width);
    let tex = pink_field(oh, ow, &mut rng);
    let plane = oh * ow;
    let mut data = vec![0.0f32; 3 * plane];
    for y in 0..oh {
        for x in 0..ow {
            let t = p.texture * tex[y * ow + x];
            for ch in 0..3 {
                let i = (2 * y) * w + 2 * x;
                let v = 0.25 * (rgb[i][ch] + rgb[i + 1][ch] + rgb[i + w][ch] + rgb[i + w + 1][ch]);
                data[ch * plane + y * ow + x] = (v + t).clamp(-1.0, 1.0);
            }
        }
    }
    Signal::new(3, &[oh, ow], data).expect("image shape is valid")
}

/// Stereo or mono tones in `[-1, 1]`: plucked harmonic notes panned across
/// the channels plus a little noise.
pub fn synth_audio(channels: usize, len: usize, sample_rate: u32, seed: u64) -> Signal<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0f32; channels * len];
    let sr = sample_rate as f32;
    let notes = (len as f32 / sr * 6.0).ceil() as usize + 1;
    for _ in 0..notes {
        let start = rng.random_range(0..len);
        let f0 = 110.0 * 2f32.powf(rng.random_range(0..36) as f32 / 12.0);
        let decay = rng.random_range(2.0..8.0);
        let amp = rng.random_range(0.05..0.2);
        let pan: f32 = rng.random_range(0.0..1.0);
        let harmonics = rng.random_range(2..8);
        let dur = ((4.0 / decay) * sr) as usize;
        for t in start..(start + dur).min(len) {
            let tt = (t - start) as f32 / sr;
            let env = amp * (-decay * tt).exp() * (1.0 - (-tt * 400.0).exp());
            let mut v = 0.0;
            for k in 1..=harmonics {
                v += (2.0 * PI * f0 * k as f32 * tt).sin() / k as f32;
            }
            for c in 0..channels {
                let g = if channels == 1 { 1.0 } else if c == 0 { 1.0 - pan } else { pan };
                data[c * len + t] += env * v * g;
            }
        }
    }
    for v in &mut data {
        *v = (*v + rng.random_range(-0.002..0.002)).clamp(-1.0, 1.0);
    }
    Signal::new(channels, &[len], data).expect("audio shape is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn images_are_deterministic_and_in_range() {
        let p = SynthImageParams::default();
        let a = synth_image(&p, 1);
        assert_eq!(a, synth_image(&p, 1));
        assert_ne!(a, synth_image(&p, 2));
        assert_eq!(a.extents(), &[96, 96]);
        assert!(a.data().iter().all(|v| (-1.0..=1.0).contains(v)));
        // Colour channels are strongly correlated.
        let mean = |c: usize| a.channel(c).iter().sum::<f32>() / 9216.0;
        let (m0, m2) = (mean(0), mean(2));
        let cov: f32 = a.channel(0).iter().zip(a.channel(2)).map(|(x, y)| (x - m0) * (y - m2)).sum();
        let var = |c: usize, m: f32| a.channel(c).iter().map(|x| (x - m).powi(2)).sum::<f32>();
        assert!(cov / (var(0, m0) * var(2, m2)).sqrt() > 0.7);
    }

    #[test]
    fn pink_field_is_normalised() {
        let f = pink_field(32, 48, &mut ChaCha8Rng::seed_from_u64(3));
        let mean = f.iter().sum::<f32>() / f.len() as f32;
        let var = f.iter().map(|v| (v - mean).powi(2)).sum::<f32>() / f.len() as f32;
        assert!(mean.abs() < 1e-4 && (var - 1.0).abs() < 1e-3);
    }

    #[test]
    fn audio_shape_and_range() {
        let a = synth_audio(2, 8000, 16000, 4);
        assert_eq!((a.channels(), a.extents()), (2, &[8000usize][..]));
        assert!(a.data().iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(a.energy() > 0.0);
    }
}
