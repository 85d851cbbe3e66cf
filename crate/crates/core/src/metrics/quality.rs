use super::MetricsError;
use crate::signal::Signal;

fn shape(s: &Signal<f32>) -> Vec<usize> {
    let mut v = vec![s.channels()];
    v.extend_from_slice(s.extents());
    v
}

fn same(a: &Signal<f32>, b: &Signal<f32>) -> Result<(), MetricsError> {
    if !a.same_shape(b) {
        return Err(MetricsError::ShapeMismatch(shape(a), shape(b)));
    }
    Ok(())
}

fn psnr_of(a: &[f32], b: &[f32], peak: f64) -> f64 {
    let mse = a.iter().zip(b).map(|(&x, &y)| (x as f64 - y as f64).powi(2)).sum::<f64>() / a.len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// `10 log10(peak^2 / MSE)`; identical signals give `+inf`.
pub fn psnr(reference: &Signal<f32>, test: &Signal<f32>, peak: f64) -> Result<f64, MetricsError> {
    same(reference, test)?;
    if !(peak > 0.0) {
        return Err(MetricsError::Peak(peak));
    }
    Ok(psnr_of(reference.data(), test.data(), peak))
}

pub fn psnr_per_channel(reference: &Signal<f32>, test: &Signal<f32>, peak: f64) -> Result<Vec<f64>, MetricsError> {
    same(reference, test)?;
    if !(peak > 0.0) {
        return Err(MetricsError::Peak(peak));
    }
    Ok((0..reference.channels()).map(|c| psnr_of(reference.channel(c), test.channel(c), peak)).collect())
}

// Wang et al.: 11x11 Gaussian window with sigma 1.5, K1 = 0.01, K2 = 0.03,
// and the five-scale weights below.
const WIN: usize = 11;
const WIN_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const MS_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
/// Smallest extent that survives four halvings with a full window.
pub const MS_SSIM_MIN_EXTENT: usize = 176;

fn window() -> [f64; WIN] {
    let mut w = [0.0; WIN];
    let c = (WIN / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        *v = (-((i as f64 - c).powi(2)) / (2.0 * WIN_SIGMA * WIN_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Valid separable Gaussian filtering of an `h x w` plane.
fn blur(x: &[f64], h: usize, w: usize, win: &[f64; WIN]) -> (Vec<f64>, usize, usize) {
    let (oh, ow) = (h + 1 - WIN, w + 1 - WIN);
    let mut rows = vec![0.0; h * ow];
    for y in 0..h {
        for xo in 0..ow {
            rows[y * ow + xo] = (0..WIN).map(|k| win[k] * x[y * w + xo + k]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for yo in 0..oh {
        for k in 0..WIN {
            let src = &rows[(yo + k) * ow..(yo + k + 1) * ow];
            for (o, &v) in out[yo * ow..(yo + 1) * ow].iter_mut().zip(src) {
                *o += win[k] * v;
            }
        }
    }
    (out, oh, ow)
}

/// Mean luminance-contrast-structure and contrast-structure terms of one plane.
fn ssim_terms(a: &[f64], b: &[f64], h: usize, w: usize, range: f64) -> (f64, f64) {
    let win = window();
    let c1 = (K1 * range).powi(2);
    let c2 = (K2 * range).powi(2);
    let (mu_a, _, _) = blur(a, h, w, &win);
    let (mu_b, _, _) = blur(b, h, w, &win);
    let sq = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x * y).collect::<Vec<_>>();
    let (aa, _, _) = blur(&sq(a, a), h, w, &win);
    let (bb, _, _) = blur(&sq(b, b), h, w, &win);
    let (ab, _, _) = blur(&sq(a, b), h, w, &win);
    let n = mu_a.len() as f64;
    let (mut s_sum, mut cs_sum) = (0.0, 0.0);
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = aa[i] - ma * ma;
        let vb = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        let cs = (2.0 * cov + c2) / (va + vb + c2);
        let l = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        s_sum += l * cs;
        cs_sum += cs;
    }
    (s_sum / n, cs_sum / n)
}

fn planes(s: &Signal<f32>) -> Vec<Vec<f64>> {
    (0..s.channels()).map(|c| s.channel(c).iter().map(|&v| v as f64).collect()).collect()
}

fn check_2d(a: &Signal<f32>, b: &Signal<f32>, what: &'static str, min: usize) -> Result<(usize, usize), MetricsError> {
    same(a, b)?;
    if a.extents().len() != 2 {
        return Err(MetricsError::NotTwoD(what));
    }
    let (h, w) = (a.extents()[0], a.extents()[1]);
    if h < min || w < min {
        return Err(MetricsError::TooSmall {
            what,
            extents: a.extents().to_vec(),
        });
    }
    Ok((h, w))
}

/// Single-scale SSIM averaged over channels; `range` is the dynamic range of
/// the samples (2.0 for `[-1, 1]`).
pub fn ssim(reference: &Signal<f32>, test: &Signal<f32>, range: f64) -> Result<f64, MetricsError> {
    let (h, w) = check_2d(reference, test, "SSIM", WIN)?;
    let (pa, pb) = (planes(reference), planes(test));
    let total: f64 = pa.iter().zip(&pb).map(|(a, b)| ssim_terms(a, b, h, w, range).0).sum();
    Ok(total / pa.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MsSsim {
    pub value: f64,
    /// Set when the input was too small and single-scale SSIM was returned.
    pub single_scale_fallback: bool,
}

fn halve(x: &[f64], h: usize, w: usize) -> (Vec<f64>, usize, usize) {
    let (oh, ow) = (h / 2, w / 2);
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for xo in 0..ow {
            let i = 2 * y * w + 2 * xo;
            out[y * ow + xo] = 0.25 * (x[i] + x[i + 1] + x[i + w] + x[i + w + 1]);
        }
    }
    (out, oh, ow)
}

/// Five-scale MS-SSIM averaged over channels. Negative per-scale terms are
/// clamped to zero before weighting.
pub fn ms_ssim(reference: &Signal<f32>, test: &Signal<f32>, range: f64) -> Result<MsSsim, MetricsError> {
    let (h, w) = check_2d(reference, test, "SSIM", WIN)?;
    if h < MS_SSIM_MIN_EXTENT || w < MS_SSIM_MIN_EXTENT {
        return Ok(MsSsim {
            value: ssim(reference, test, range)?,
            single_scale_fallback: true,
        });
    }
    let mut total = 0.0;
    for (a, b) in planes(reference).into_iter().zip(planes(test)) {
        let (mut a, mut b, mut h, mut w) = (a, b, h, w);
        let mut v = 1.0;
        for (s, &weight) in MS_WEIGHTS.iter().enumerate() {
            let (full, cs) = ssim_terms(&a, &b, h, w, range);
            let term = if s + 1 == MS_WEIGHTS.len() { full } else { cs };
            v *= term.max(0.0).powf(weight);
            if s + 1 < MS_WEIGHTS.len() {
                let (na, nh, nw) = halve(&a, h, w);
                b = halve(&b, h, w).0;
                a = na;
                h = nh;
                w = nw;
            }
        }
        total += v;
    }
    Ok(MsSsim {
        value: total / reference.channels() as f64,
        single_scale_fallback: false,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct QualityReport {
    pub psnr: f64,
    pub per_channel_psnr: Vec<f64>,
    /// 2D only.
    pub ssim: Option<f64>,
    /// 2D only.
    pub ms_ssim: Option<MsSsim>,
}

/// PSNR for any signal, plus SSIM and MS-SSIM for 2D signals at least one
/// window wide. `peak` doubles as the SSIM dynamic range.
pub fn quality(reference: &Signal<f32>, test: &Signal<f32>, peak: f64) -> Result<QualityReport, MetricsError> {
    let two_d = reference.extents().len() == 2 && reference.extents().iter().all(|&e| e >= WIN);
    Ok(QualityReport {
        psnr: psnr(reference, test, peak)?,
        per_channel_psnr: psnr_per_channel(reference, test, peak)?,
        ssim: if two_d { Some(ssim(reference, test, peak)?) } else { None },
        ms_ssim: if two_d { Some(ms_ssim(reference, test, peak)?) } else { None },
    })
}
