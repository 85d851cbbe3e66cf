//! Wavelet packet transform over the CDF 9/7 biorthogonal filterbank.
//!
//! Every level splits every channel into a lowpass and a highpass band and
//! decimates by two along each transformed axis, so a `J`-level transform of
//! a `C`-channel signal has `C * 2^(J*d)` channels at `1/2^J` of the extent per
//! axis. Children of channel `c` are stored adjacently (recursive order):
//! `2c, 2c+1` in 1D and `4c..4c+4` in 2D, where the 2D children are
//! `(vertical, horizontal)` = `(lo,lo), (lo,hi), (hi,lo), (hi,hi)`.
//!
//! Boundaries use whole-sample symmetric extension, as in JPEG 2000, which
//! keeps the transform an exact bijection on finite signals.
//!
//! The adjoint (transpose) of both directions is exposed as well; the
//! training graph needs them to backpropagate through the transforms.

use num_traits::Float;
use thiserror::Error;

use crate::signal::{Kind, ShapeError, Signal};

// CDF 9/7 prototypes with unit DC gain, from the real-root factorisation of
// the degree-3 Daubechies polynomial. Index 0 is the centre tap.
const PROTO_9: [f64; 5] = [
    0.602_949_018_236_360_348_189,
    0.266_864_118_442_874_954_426,
    -0.078_223_266_528_990_262_509,
    -0.016_864_118_442_874_954_426,
    0.026_748_757_410_810_088_414,
];
const PROTO_7: [f64; 4] = [
    0.557_543_526_228_500_182_295,
    0.295_635_881_557_125_045_574,
    -0.028_771_763_114_250_091_148,
    -0.045_635_881_557_125_045_574,
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WaveletError {
    #[error("extent {extent} on axis {axis} is not divisible by 2^{levels}")]
    NotDivisible {
        axis: usize,
        extent: usize,
        levels: u32,
    },
    #[error("{channels} channels cannot hold a level-{levels} {dims}D packet tensor")]
    ChannelCount {
        channels: usize,
        levels: u32,
        dims: usize,
    },
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Analysis/synthesis filter pairs. Filters are symmetric and stored as full
/// odd-length tap vectors centred on the middle element.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    pub lo_analysis: Vec<f64>,
    pub hi_analysis: Vec<f64>,
    pub lo_synthesis: Vec<f64>,
    pub hi_synthesis: Vec<f64>,
}

fn symmetric_taps(half: &[f64], scale: f64, alternate: bool) -> Vec<f64> {
    let r = half.len() as isize - 1;
    (-r..=r)
        .map(|j| {
            let sign = if alternate && j % 2 != 0 { -1.0 } else { 1.0 };
            half[j.unsigned_abs()] * scale * sign
        })
        .collect()
}

/// The CDF 9/7 filterbank (JPEG 2000 irreversible filters), scaled so that
/// the analysis lowpass sums to sqrt(2) and the highpass has sqrt(2) gain at
/// Nyquist.
pub fn make_cdf97_filterbank() -> FilterBank {
    let s = std::f64::consts::SQRT_2;
    FilterBank {
        lo_analysis: symmetric_taps(&PROTO_9, s, false),
        hi_analysis: symmetric_taps(&PROTO_7, s, true),
        lo_synthesis: symmetric_taps(&PROTO_7, s, false),
        hi_synthesis: symmetric_taps(&PROTO_9, s, true),
    }
}

/// Multi-channel packet coefficients together with the level count that
/// produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbandTensor<T = f32> {
    levels: u32,
    coeffs: Signal<T>,
}

impl<T: Float> SubbandTensor<T> {
    /// Wraps a coefficient tensor, checking the channel count is a whole
    /// number of packet groups.
    pub fn new(coeffs: Signal<T>, levels: u32) -> Result<Self, WaveletError> {
        let dims = coeffs.kind().dims();
        let group = 1usize << (levels as usize * dims);
        if coeffs.channels() % group != 0 {
            return Err(WaveletError::ChannelCount {
                channels: coeffs.channels(),
                levels,
                dims,
            });
        }
        Ok(SubbandTensor { levels, coeffs })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Channel count of the signal these coefficients came from.
    pub fn source_channels(&self) -> usize {
        self.coeffs.channels() >> (self.levels as usize * self.coeffs.kind().dims())
    }

    pub fn coeffs(&self) -> &Signal<T> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Signal<T> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Signal<T> {
        self.coeffs
    }
}

/// Filter taps converted to the working precision, with the tap radius.
struct Taps<T> {
    lo_a: Vec<T>,
    hi_a: Vec<T>,
    lo_s: Vec<T>,
    hi_s: Vec<T>,
    /// Present when the analysis filters are the CDF 9/7 pair.
    lift: Option<Lifting<T>>,
}

// Predict/update factorisation of the CDF 9/7 analysis pair.
const LIFT_STEPS: [f64; 4] = [
    -1.586_134_342_059_924,
    -0.052_980_118_572_961,
    0.882_911_075_530_934,
    0.443_506_852_043_971,
];

struct Lifting<T> {
    steps: [T; 4],
    lo_gain: T,
    hi_gain: T,
}

impl<T: Float> Lifting<T> {
    fn cdf97() -> Self {
        // Output of the unscaled steps on a constant and on an alternating
        // signal, which must become sqrt(2) and -sqrt(2) respectively.
        let run = |mut s: f64, mut d: f64| {
            for (i, c) in LIFT_STEPS.iter().enumerate() {
                if i % 2 == 0 {
                    d += 2.0 * c * s;
                } else {
                    s += 2.0 * c * d;
                }
            }
            (s, d)
        };
        let (dc, _) = run(1.0, 1.0);
        let (_, nyq) = run(1.0, -1.0);
        let of = |v: f64| T::from(v).unwrap();
        Lifting {
            steps: LIFT_STEPS.map(of),
            lo_gain: of(std::f64::consts::SQRT_2 / dc),
            hi_gain: of(-std::f64::consts::SQRT_2 / nyq),
        }
    }
}

fn is_cdf97(fb: &FilterBank) -> bool {
    let reference = make_cdf97_filterbank();
    let close = |a: &[f64], b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15);
    close(&fb.lo_analysis, &reference.lo_analysis) && close(&fb.hi_analysis, &reference.hi_analysis)
}

fn cast_taps<T: Float>(taps: &[f64]) -> Vec<T> {
    taps.iter().map(|&t| T::from(t).unwrap()).collect()
}

impl<T: Float> Taps<T> {
    fn new(fb: &FilterBank) -> Self {
        Taps {
            lo_a: cast_taps(&fb.lo_analysis),
            hi_a: cast_taps(&fb.hi_analysis),
            lo_s: cast_taps(&fb.lo_synthesis),
            hi_s: cast_taps(&fb.hi_synthesis),
            lift: is_cdf97(fb).then(Lifting::cdf97),
        }
    }
}

/// Whole-sample symmetric extension of index `i` onto `[0, n)`.
#[inline]
pub(crate) fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut i = i.rem_euclid(period);
    if i >= n as isize {
        i = period - i;
    }
    i as usize
}

#[inline]
fn axpy<T: Float>(dst: &mut [T], a: T, src: &[T]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = *d + a * s;
    }
}

// The four kernels below operate on `n` samples of `lanes` interleaved values
// each: sample `i` is `x[i*lanes..(i+1)*lanes]`. With `lanes == 1` this is an
// ordinary 1D signal; with `lanes == width` it filters the columns of a plane
// one whole row at a time.

fn lift_dispatch<T: Float>(l: &Lifting<T>, x: &[T], n: usize, lanes: usize, lo: &mut [T], hi: &mut [T]) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports AVX2. No FMA, so results are unchanged.
        return unsafe { lift_lanes_avx2(l, x, n, lanes, lo, hi) };
    }
    lift_lanes(l, x, n, lanes, lo, hi)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
fn lift_lanes_avx2<T: Float>(l: &Lifting<T>, x: &[T], n: usize, lanes: usize, lo: &mut [T], hi: &mut [T]) {
    lift_lanes(l, x, n, lanes, lo, hi)
}

/// Analysis by lifting. Symmetric extension reduces to repeating the last
/// even sample on the right and the first odd sample on the left.
#[inline(always)]
fn lift_lanes<T: Float>(l: &Lifting<T>, x: &[T], n: usize, lanes: usize, lo: &mut [T], hi: &mut [T]) {
    if lanes == 1 {
        return lift_row(l, x, lo, hi);
    }
    let half = n / 2;
    for k in 0..half {
        lo[k * lanes..(k + 1) * lanes].copy_from_slice(&x[2 * k * lanes..(2 * k + 1) * lanes]);
        hi[k * lanes..(k + 1) * lanes].copy_from_slice(&x[(2 * k + 1) * lanes..(2 * k + 2) * lanes]);
    }
    for (i, &c) in l.steps.iter().enumerate() {
        for k in 0..half {
            let (dst, src, a, b) = if i % 2 == 0 {
                (&mut *hi, &*lo, k, (k + 1).min(half - 1))
            } else {
                (&mut *lo, &*hi, k.saturating_sub(1), k)
            };
            let (sa, sb) = (&src[a * lanes..(a + 1) * lanes], &src[b * lanes..(b + 1) * lanes]);
            for ((d, &p), &q) in dst[k * lanes..(k + 1) * lanes].iter_mut().zip(sa).zip(sb) {
                *d = *d + c * (p + q);
            }
        }
    }
    lo[..half * lanes].iter_mut().for_each(|v| *v = *v * l.lo_gain);
    hi[..half * lanes].iter_mut().for_each(|v| *v = *v * l.hi_gain);
}

/// Single-lane lifting: deinterleave, then run each step as one contiguous
/// sweep over the half-length bands.
#[inline(always)]
fn lift_row<T: Float>(l: &Lifting<T>, x: &[T], lo: &mut [T], hi: &mut [T]) {
    let half = x.len() / 2;
    let (lo, hi) = (&mut lo[..half], &mut hi[..half]);
    for (k, pair) in x.chunks_exact(2).enumerate() {
        lo[k] = pair[0];
        hi[k] = pair[1];
    }
    let two = T::one() + T::one();
    for (i, &c) in l.steps.iter().enumerate() {
        if i % 2 == 0 {
            for ((d, &a), &b) in hi.iter_mut().zip(lo.iter()).zip(&lo[1..]) {
                *d = *d + c * (a + b);
            }
            hi[half - 1] = hi[half - 1] + c * two * lo[half - 1];
        } else {
            for ((d, &a), &b) in lo[1..].iter_mut().zip(hi.iter()).zip(&hi[1..]) {
                *d = *d + c * (a + b);
            }
            lo[0] = lo[0] + c * two * hi[0];
        }
    }
    lo.iter_mut().for_each(|v| *v = *v * l.lo_gain);
    hi.iter_mut().for_each(|v| *v = *v * l.hi_gain);
}

fn analyze_lanes<T: Float>(t: &Taps<T>, x: &[T], n: usize, lanes: usize, lo: &mut [T], hi: &mut [T]) {
    let rl = (t.lo_a.len() / 2) as isize;
    let rh = (t.hi_a.len() / 2) as isize;
    if lanes == 1 {
        return analyze_scalar(t, x, lo, hi);
    }
    lo.fill(T::zero());
    hi.fill(T::zero());
    for k in 0..n / 2 {
        let out = &mut lo[k * lanes..(k + 1) * lanes];
        for j in -rl..=rl {
            let i = reflect(2 * k as isize + j, n);
            axpy(out, t.lo_a[(j + rl) as usize], &x[i * lanes..(i + 1) * lanes]);
        }
        let out = &mut hi[k * lanes..(k + 1) * lanes];
        for j in -rh..=rh {
            let i = reflect(2 * k as isize + 1 + j, n);
            axpy(out, t.hi_a[(j + rh) as usize], &x[i * lanes..(i + 1) * lanes]);
        }
    }
}

// Hot path of the encoder: folds the symmetric taps away from the borders.
fn analyze_scalar<T: Float>(t: &Taps<T>, x: &[T], lo: &mut [T], hi: &mut [T]) {
    let n = x.len();
    let rl = t.lo_a.len() / 2;
    let rh = t.hi_a.len() / 2;
    let lo_c = &t.lo_a[rl..];
    let hi_c = &t.hi_a[rh..];
    for k in 0..n / 2 {
        let c = 2 * k;
        if c >= rl && c + rl < n {
            let mut acc = lo_c[0] * x[c];
            for j in 1..=rl {
                acc = acc + lo_c[j] * (x[c - j] + x[c + j]);
            }
            lo[k] = acc;
        } else {
            let mut acc = T::zero();
            for j in -(rl as isize)..=rl as isize {
                acc = acc + lo_c[j.unsigned_abs()] * x[reflect(c as isize + j, n)];
            }
            lo[k] = acc;
        }
        let c = 2 * k + 1;
        if c >= rh && c + rh < n {
            let mut acc = hi_c[0] * x[c];
            for j in 1..=rh {
                acc = acc + hi_c[j] * (x[c - j] + x[c + j]);
            }
            hi[k] = acc;
        } else {
            let mut acc = T::zero();
            for j in -(rh as isize)..=rh as isize {
                acc = acc + hi_c[j.unsigned_abs()] * x[reflect(c as isize + j, n)];
            }
            hi[k] = acc;
        }
    }
}

fn analyze_adjoint_lanes<T: Float>(
    t: &Taps<T>,
    g_lo: &[T],
    g_hi: &[T],
    n: usize,
    lanes: usize,
    gx: &mut [T],
) {
    let rl = (t.lo_a.len() / 2) as isize;
    let rh = (t.hi_a.len() / 2) as isize;
    gx.fill(T::zero());
    for k in 0..n / 2 {
        let src = &g_lo[k * lanes..(k + 1) * lanes];
        for j in -rl..=rl {
            let i = reflect(2 * k as isize + j, n);
            axpy(&mut gx[i * lanes..(i + 1) * lanes], t.lo_a[(j + rl) as usize], src);
        }
        let src = &g_hi[k * lanes..(k + 1) * lanes];
        for j in -rh..=rh {
            let i = reflect(2 * k as isize + 1 + j, n);
            axpy(&mut gx[i * lanes..(i + 1) * lanes], t.hi_a[(j + rh) as usize], src);
        }
    }
}

/// Upsample-and-filter: `x[m] = sum_j ls[j] u[m+j] + hs[j] v[m+j]` where `u`
/// holds the lowpass band on even positions and `v` the highpass band on odd
/// positions, both symmetrically extended.
fn synthesize_lanes<T: Float>(t: &Taps<T>, lo: &[T], hi: &[T], n: usize, lanes: usize, x: &mut [T]) {
    let rl = (t.lo_s.len() / 2) as isize;
    let rh = (t.hi_s.len() / 2) as isize;
    x.fill(T::zero());
    for m in 0..n {
        let out = &mut x[m * lanes..(m + 1) * lanes];
        for j in -rl..=rl {
            let i = reflect(m as isize + j, n);
            if i % 2 == 0 {
                let k = i / 2;
                axpy(out, t.lo_s[(j + rl) as usize], &lo[k * lanes..(k + 1) * lanes]);
            }
        }
        for j in -rh..=rh {
            let i = reflect(m as isize + j, n);
            if i % 2 == 1 {
                let k = i / 2;
                axpy(out, t.hi_s[(j + rh) as usize], &hi[k * lanes..(k + 1) * lanes]);
            }
        }
    }
}

fn synthesize_adjoint_lanes<T: Float>(
    t: &Taps<T>,
    gx: &[T],
    n: usize,
    lanes: usize,
    g_lo: &mut [T],
    g_hi: &mut [T],
) {
    let rl = (t.lo_s.len() / 2) as isize;
    let rh = (t.hi_s.len() / 2) as isize;
    g_lo.fill(T::zero());
    g_hi.fill(T::zero());
    for m in 0..n {
        let src = &gx[m * lanes..(m + 1) * lanes];
        for j in -rl..=rl {
            let i = reflect(m as isize + j, n);
            if i % 2 == 0 {
                let k = i / 2;
                axpy(&mut g_lo[k * lanes..(k + 1) * lanes], t.lo_s[(j + rl) as usize], src);
            }
        }
        for j in -rh..=rh {
            let i = reflect(m as isize + j, n);
            if i % 2 == 1 {
                let k = i / 2;
                axpy(&mut g_hi[k * lanes..(k + 1) * lanes], t.hi_s[(j + rh) as usize], src);
            }
        }
    }
}

/// One level in the analysis direction (or the transpose of one synthesis
/// level, which has the same shape signature).
#[derive(Clone, Copy)]
enum Down {
    Analysis,
    SynthesisAdjoint,
}

/// One level in the synthesis direction (or the transpose of analysis).
#[derive(Clone, Copy)]
enum Up {
    Synthesis,
    AnalysisAdjoint,
}

fn split_1d<T: Float>(t: &Taps<T>, mode: Down, x: &[T], n: usize, lanes: usize, lo: &mut [T], hi: &mut [T]) {
    match mode {
        Down::Analysis => match &t.lift {
            Some(l) => lift_dispatch(l, x, n, lanes, lo, hi),
            None => analyze_lanes(t, x, n, lanes, lo, hi),
        },
        Down::SynthesisAdjoint => synthesize_adjoint_lanes(t, x, n, lanes, lo, hi),
    }
}

fn merge_1d<T: Float>(t: &Taps<T>, mode: Up, lo: &[T], hi: &[T], n: usize, lanes: usize, x: &mut [T]) {
    match mode {
        Up::Synthesis => synthesize_lanes(t, lo, hi, n, lanes, x),
        Up::AnalysisAdjoint => analyze_adjoint_lanes(t, lo, hi, n, lanes, x),
    }
}

fn level_down<T: Float>(t: &Taps<T>, mode: Down, input: &Signal<T>) -> Signal<T> {
    let c_in = input.channels();
    match input.extents() {
        &[n] => {
            let mut out = Signal::zeros(2 * c_in, &[n / 2]).unwrap();
            let half = n / 2;
            for c in 0..c_in {
                let (lo, hi) = out.data_mut()[2 * c * half..(2 * c + 2) * half].split_at_mut(half);
                split_1d(t, mode, input.channel(c), n, 1, lo, hi);
            }
            out
        }
        &[h, w] if matches!(mode, Down::Analysis) && t.lift.is_some() => {
            // Lifting vectorises along a row directly: rows, then columns a
            // whole row of lanes at a time.
            let (h2, w2) = (h / 2, w / 2);
            let mut out = Signal::zeros(4 * c_in, &[h2, w2]).unwrap();
            let plane = h2 * w2;
            let mut row_lo = vec![T::zero(); h * w2];
            let mut row_hi = vec![T::zero(); h * w2];
            for c in 0..c_in {
                let x = input.channel(c);
                for r in 0..h {
                    split_1d(
                        t,
                        mode,
                        &x[r * w..(r + 1) * w],
                        w,
                        1,
                        &mut row_lo[r * w2..(r + 1) * w2],
                        &mut row_hi[r * w2..(r + 1) * w2],
                    );
                }
                let group = &mut out.data_mut()[4 * c * plane..(4 * c + 4) * plane];
                let (ll_lh, hl_hh) = group.split_at_mut(2 * plane);
                let (ll, lh) = ll_lh.split_at_mut(plane);
                let (hl, hh) = hl_hh.split_at_mut(plane);
                split_1d(t, mode, &row_lo, h, w2, ll, hl);
                split_1d(t, mode, &row_hi, h, w2, lh, hh);
            }
            out
        }
        &[h, w] => {
            // Columns first, one whole row of lanes at a time; then rows, as
            // columns of the transposed half-planes.
            let (h2, w2) = (h / 2, w / 2);
            let mut out = Signal::zeros(4 * c_in, &[h2, w2]).unwrap();
            let plane = h2 * w2;
            let mut col_lo = vec![T::zero(); h2 * w];
            let mut col_hi = vec![T::zero(); h2 * w];
            let mut tr = vec![T::zero(); w * h2];
            let mut lo_t = vec![T::zero(); plane];
            let mut hi_t = vec![T::zero(); plane];
            for c in 0..c_in {
                split_1d(t, mode, input.channel(c), h, w, &mut col_lo, &mut col_hi);
                let group = &mut out.data_mut()[4 * c * plane..(4 * c + 4) * plane];
                for (k, band) in [&col_lo, &col_hi].into_iter().enumerate() {
                    transpose(band, h2, w, &mut tr);
                    split_1d(t, mode, &tr, w, h2, &mut lo_t, &mut hi_t);
                    transpose(&lo_t, w2, h2, &mut group[2 * k * plane..(2 * k + 1) * plane]);
                    transpose(&hi_t, w2, h2, &mut group[(2 * k + 1) * plane..(2 * k + 2) * plane]);
                }
            }
            out
        }
        _ => unreachable!("signals are 1D or 2D"),
    }
}

/// Row-major `rows x cols` into `cols x rows`.
fn transpose<T: Copy>(src: &[T], rows: usize, cols: usize, dst: &mut [T]) {
    const B: usize = 8;
    let (rb, cb) = (rows / B * B, cols / B * B);
    for r0 in (0..rb).step_by(B) {
        for c0 in (0..cb).step_by(B) {
            let mut tile = [[src[0]; B]; B];
            for (i, t) in tile.iter_mut().enumerate() {
                t.copy_from_slice(&src[(r0 + i) * cols + c0..][..B]);
            }
            for j in 0..B {
                let d: &mut [T; B] = (&mut dst[(c0 + j) * rows + r0..][..B]).try_into().unwrap();
                for i in 0..B {
                    d[i] = tile[i][j];
                }
            }
        }
    }
    // Ragged edges.
    for r in 0..rows {
        let start = if r < rb { cb } else { 0 };
        for c in start..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

fn level_up<T: Float>(t: &Taps<T>, mode: Up, input: &Signal<T>) -> Signal<T> {
    match input.extents() {
        &[half] => {
            let c_out = input.channels() / 2;
            let n = 2 * half;
            let mut out = Signal::zeros(c_out, &[n]).unwrap();
            for c in 0..c_out {
                merge_1d(
                    t,
                    mode,
                    input.channel(2 * c),
                    input.channel(2 * c + 1),
                    n,
                    1,
                    out.channel_mut(c),
                );
            }
            out
        }
        &[h2, w2] => {
            let c_out = input.channels() / 4;
            let (h, w) = (2 * h2, 2 * w2);
            let mut out = Signal::zeros(c_out, &[h, w]).unwrap();
            let mut row_lo = vec![T::zero(); h * w2];
            let mut row_hi = vec![T::zero(); h * w2];
            for c in 0..c_out {
                merge_1d(
                    t,
                    mode,
                    input.channel(4 * c),
                    input.channel(4 * c + 2),
                    h,
                    w2,
                    &mut row_lo,
                );
                merge_1d(
                    t,
                    mode,
                    input.channel(4 * c + 1),
                    input.channel(4 * c + 3),
                    h,
                    w2,
                    &mut row_hi,
                );
                let x = out.channel_mut(c);
                for r in 0..h {
                    merge_1d(
                        t,
                        mode,
                        &row_lo[r * w2..(r + 1) * w2],
                        &row_hi[r * w2..(r + 1) * w2],
                        w,
                        1,
                        &mut x[r * w..(r + 1) * w],
                    );
                }
            }
            out
        }
        _ => unreachable!("signals are 1D or 2D"),
    }
}

fn check_divisible(extents: &[usize], levels: u32) -> Result<(), WaveletError> {
    let factor = 1usize << levels;
    for (axis, &extent) in extents.iter().enumerate() {
        if extent % factor != 0 {
            return Err(WaveletError::NotDivisible {
                axis,
                extent,
                levels,
            });
        }
    }
    Ok(())
}

/// Forward wavelet packet transform with `levels` full levels.
pub fn wpt_forward<T: Float>(
    signal: &Signal<T>,
    levels: u32,
    fb: &FilterBank,
) -> Result<SubbandTensor<T>, WaveletError> {
    check_divisible(signal.extents(), levels)?;
    let taps = Taps::new(fb);
    let mut cur = signal.clone();
    for _ in 0..levels {
        cur = level_down(&taps, Down::Analysis, &cur);
    }
    SubbandTensor::new(cur, levels)
}

/// Inverse wavelet packet transform.
pub fn wpt_inverse<T: Float>(subbands: &SubbandTensor<T>, fb: &FilterBank) -> Signal<T> {
    let taps = Taps::new(fb);
    let mut cur = subbands.coeffs().clone();
    for _ in 0..subbands.levels() {
        cur = level_up(&taps, Up::Synthesis, &cur);
    }
    cur
}

/// Transpose of [`wpt_forward`]: maps a gradient on the coefficients back to
/// a gradient on the signal.
pub fn wpt_forward_adjoint<T: Float>(grad: &SubbandTensor<T>, fb: &FilterBank) -> Signal<T> {
    let taps = Taps::new(fb);
    let mut cur = grad.coeffs().clone();
    for _ in 0..grad.levels() {
        cur = level_up(&taps, Up::AnalysisAdjoint, &cur);
    }
    cur
}

/// Transpose of [`wpt_inverse`]: maps a gradient on the reconstructed signal
/// back onto the coefficients.
pub fn wpt_inverse_adjoint<T: Float>(
    grad: &Signal<T>,
    levels: u32,
    fb: &FilterBank,
) -> Result<SubbandTensor<T>, WaveletError> {
    check_divisible(grad.extents(), levels)?;
    let taps = Taps::new(fb);
    let mut cur = grad.clone();
    for _ in 0..levels {
        cur = level_down(&taps, Down::SynthesisAdjoint, &cur);
    }
    SubbandTensor::new(cur, levels)
}

/// Channel count after a `levels`-level transform of a `channels`-channel
/// signal of the given kind.
pub fn subband_channels(channels: usize, levels: u32, kind: Kind) -> usize {
    channels << (levels as usize * kind.dims())
}
