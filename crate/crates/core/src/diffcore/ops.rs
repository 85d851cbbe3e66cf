//! Forward and backward kernels. The tape calls these; inference paths call
//! the forward halves directly.

use super::{shape_err, DiffError, Scalar, Tensor};
use crate::codec::companding;

/// Affine map along the channel axis at every position:
/// `out[o, p] = sum_i w[i, o] * x[i, p] + b[o]`.
pub fn dense_forward<T: Scalar>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
    if w.shape().len() != 2 || x.shape().is_empty() || x.channels() != w.shape()[0] {
        return Err(shape_err("dense", format!("input {:?} weights {:?}", x.shape(), w.shape())));
    }
    let (c_in, c_out) = (w.shape()[0], w.shape()[1]);
    if b.shape() != [c_out] {
        return Err(shape_err("dense", format!("bias {:?} for {c_out} outputs", b.shape())));
    }
    let p = x.positions();
    let mut out_shape = x.shape().to_vec();
    out_shape[0] = c_out;
    let mut out = vec![T::zero(); c_out * p];
    for (o, row) in out.chunks_mut(p.max(1)).enumerate().take(c_out) {
        row.fill(b.data()[o]);
    }
    T::gemm(c_out, c_in, p, w.data(), true, x.data(), false, T::one(), &mut out);
    Tensor::new(&out_shape, out)
}

pub(crate) fn dense_backward<T: Scalar>(x: &Tensor<T>, w: &Tensor<T>, gout: &Tensor<T>) -> (Tensor<T>, Tensor<T>, Tensor<T>) {
    let (c_in, c_out) = (w.shape()[0], w.shape()[1]);
    let p = x.positions();
    let mut gx = Tensor::zeros(x.shape());
    T::gemm(c_in, c_out, p, w.data(), false, gout.data(), false, T::zero(), gx.data_mut());
    let mut gw = Tensor::zeros(w.shape());
    T::gemm(c_in, p, c_out, x.data(), false, gout.data(), true, T::zero(), gw.data_mut());
    let gb = Tensor::from_fn(&[c_out], |o| gout.data()[o * p..(o + 1) * p].iter().copied().sum());
    (gx, gw, gb)
}

/// Geometry of a stride-1, zero "same"-padded convolution. 1D inputs are
/// handled as a single-row image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvGeom {
    pub c_in: usize,
    pub c_out: usize,
    pub h: usize,
    pub w: usize,
    pub kh: usize,
    pub kw: usize,
}

impl ConvGeom {
    pub fn new<T: Scalar>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>) -> Result<Self, DiffError> {
        let xs = x.shape();
        let ws = w.shape();
        let err = || shape_err("conv", format!("input {xs:?} kernel {ws:?} bias {:?}", b.shape()));
        let geom = match (xs.len(), ws.len()) {
            (2, 3) => ConvGeom {
                c_in: xs[0],
                c_out: ws[0],
                h: 1,
                w: xs[1],
                kh: 1,
                kw: ws[2],
            },
            (3, 4) if ws[2] == ws[3] => ConvGeom {
                c_in: xs[0],
                c_out: ws[0],
                h: xs[1],
                w: xs[2],
                kh: ws[2],
                kw: ws[3],
            },
            _ => return Err(err()),
        };
        if ws[1] != geom.c_in || b.shape() != [geom.c_out] || geom.kh % 2 == 0 || geom.kw % 2 == 0 {
            return Err(err());
        }
        Ok(geom)
    }

    fn positions(&self) -> usize {
        self.h * self.w
    }

    fn patch(&self) -> usize {
        self.c_in * self.kh * self.kw
    }

    fn pointwise(&self) -> bool {
        self.kh == 1 && self.kw == 1
    }
}

fn im2col<T: Scalar>(g: &ConvGeom, x: &[T], cols: &mut [T]) {
    let (h, w, p) = (g.h, g.w, g.positions());
    let (rh, rw) = ((g.kh / 2) as isize, (g.kw / 2) as isize);
    let mut row = 0;
    for ci in 0..g.c_in {
        let plane = &x[ci * p..(ci + 1) * p];
        for ky in 0..g.kh as isize {
            for kx in 0..g.kw as isize {
                let dst = &mut cols[row * p..(row + 1) * p];
                let dx = kx - rw;
                let lo = (-dx).max(0) as usize;
                let hi = (w as isize - dx).min(w as isize).max(0) as usize;
                for y in 0..h {
                    let sy = y as isize + ky - rh;
                    let out = &mut dst[y * w..(y + 1) * w];
                    if sy < 0 || sy >= h as isize || lo >= hi {
                        out.fill(T::zero());
                        continue;
                    }
                    let src = &plane[sy as usize * w..(sy as usize + 1) * w];
                    out[..lo].fill(T::zero());
                    out[hi..].fill(T::zero());
                    let s0 = (lo as isize + dx) as usize;
                    out[lo..hi].copy_from_slice(&src[s0..s0 + (hi - lo)]);
                }
                row += 1;
            }
        }
    }
}

fn col2im<T: Scalar>(g: &ConvGeom, cols: &[T], gx: &mut [T]) {
    let (h, w, p) = (g.h, g.w, g.positions());
    let (rh, rw) = ((g.kh / 2) as isize, (g.kw / 2) as isize);
    gx.fill(T::zero());
    let mut row = 0;
    for ci in 0..g.c_in {
        for ky in 0..g.kh as isize {
            for kx in 0..g.kw as isize {
                let src = &cols[row * p..(row + 1) * p];
                let dx = kx - rw;
                let lo = (-dx).max(0) as usize;
                let hi = (w as isize - dx).min(w as isize).max(0) as usize;
                for y in 0..h {
                    let sy = y as isize + ky - rh;
                    if sy < 0 || sy >= h as isize || lo >= hi {
                        continue;
                    }
                    let base = ci * p + sy as usize * w;
                    let s0 = (lo as isize + dx) as usize;
                    let dst = &mut gx[base + s0..base + s0 + (hi - lo)];
                    for (d, &v) in dst.iter_mut().zip(&src[y * w + lo..y * w + hi]) {
                        *d = *d + v;
                    }
                }
                row += 1;
            }
        }
    }
}

/// Stride-1 convolution with zero "same" padding. Kernels are
/// `[C_out, C_in, k]` (1D) or `[C_out, C_in, k, k]` (2D) with odd `k`.
pub fn conv_forward<T: Scalar>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
    let g = ConvGeom::new(x, w, b)?;
    let p = g.positions();
    let mut out = vec![T::zero(); g.c_out * p];
    for (o, row) in out.chunks_mut(p).enumerate() {
        row.fill(b.data()[o]);
    }
    if g.pointwise() {
        T::gemm(g.c_out, g.c_in, p, w.data(), false, x.data(), false, T::one(), &mut out);
    } else {
        let mut cols = vec![T::zero(); g.patch() * p];
        im2col(&g, x.data(), &mut cols);
        T::gemm(g.c_out, g.patch(), p, w.data(), false, &cols, false, T::one(), &mut out);
    }
    let mut shape = x.shape().to_vec();
    shape[0] = g.c_out;
    Tensor::new(&shape, out)
}

pub(crate) fn conv_backward<T: Scalar>(x: &Tensor<T>, w: &Tensor<T>, b: &Tensor<T>, gout: &Tensor<T>) -> (Tensor<T>, Tensor<T>, Tensor<T>) {
    let g = ConvGeom::new(x, w, b).expect("validated in forward");
    let p = g.positions();
    let mut gx = Tensor::zeros(x.shape());
    let mut gw = Tensor::zeros(w.shape());
    if g.pointwise() {
        T::gemm(g.c_out, p, g.c_in, gout.data(), false, x.data(), true, T::zero(), gw.data_mut());
        T::gemm(g.c_in, g.c_out, p, w.data(), true, gout.data(), false, T::zero(), gx.data_mut());
    } else {
        let mut cols = vec![T::zero(); g.patch() * p];
        im2col(&g, x.data(), &mut cols);
        T::gemm(g.c_out, p, g.patch(), gout.data(), false, &cols, true, T::zero(), gw.data_mut());
        T::gemm(g.patch(), g.c_out, p, w.data(), true, gout.data(), false, T::zero(), &mut cols);
        col2im(&g, &cols, gx.data_mut());
    }
    let gb = Tensor::from_fn(&[g.c_out], |o| gout.data()[o * p..(o + 1) * p].iter().copied().sum());
    (gx, gw, gb)
}

#[inline]
fn sigmoid<T: Scalar>(v: T) -> T {
    T::one() / (T::one() + (-v).exp())
}

pub fn silu_forward<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    let mut out = x.clone();
    for v in out.data_mut() {
        *v = *v * sigmoid(*v);
    }
    out
}

pub(crate) fn silu_backward<T: Scalar>(x: &Tensor<T>, gout: &Tensor<T>) -> Tensor<T> {
    let mut gx = gout.clone();
    for (g, &v) in gx.data_mut().iter_mut().zip(x.data()) {
        let s = sigmoid(v);
        *g = *g * s * (T::one() + v * (T::one() - s));
    }
    gx
}

fn per_channel_check<T: Scalar>(op: &'static str, x: &Tensor<T>, s: &Tensor<T>) -> Result<(), DiffError> {
    if x.shape().is_empty() || s.shape() != [x.channels()] {
        return Err(shape_err(op, format!("input {:?} scales {:?}", x.shape(), s.shape())));
    }
    Ok(())
}

/// Per-channel Gaussian-CDF compander with log-scale parameters.
pub fn compand_forward<T: Scalar>(x: &Tensor<T>, log_scale: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
    per_channel_check("compand", x, log_scale)?;
    let p = x.positions();
    let mut out = x.clone();
    for (c, row) in out.data_mut().chunks_mut(p).enumerate() {
        let sigma = log_scale.data()[c].f64().exp();
        for v in row {
            *v = T::of(companding::compand_value(v.f64(), sigma));
        }
    }
    Ok(out)
}

pub(crate) fn compand_backward<T: Scalar>(x: &Tensor<T>, log_scale: &Tensor<T>, gout: &Tensor<T>) -> (Tensor<T>, Tensor<T>) {
    let p = x.positions();
    let mut gx = Tensor::zeros(x.shape());
    let mut gs = Tensor::zeros(log_scale.shape());
    for c in 0..x.channels() {
        let sigma = log_scale.data()[c].f64().exp();
        let mut acc = 0.0;
        for i in c * p..(c + 1) * p {
            let (dz, dlog) = companding::compand_partials(x.data()[i].f64(), sigma);
            let g = gout.data()[i].f64();
            gx.data_mut()[i] = T::of(g * dz);
            acc += g * dlog;
        }
        gs.data_mut()[c] = T::of(acc);
    }
    (gx, gs)
}

pub fn decompand_forward<T: Scalar>(y: &Tensor<T>, log_scale: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
    per_channel_check("decompand", y, log_scale)?;
    let p = y.positions();
    let mut out = y.clone();
    for (c, row) in out.data_mut().chunks_mut(p).enumerate() {
        let sigma = log_scale.data()[c].f64().exp();
        for v in row {
            *v = T::of(companding::decompand_value(v.f64(), sigma));
        }
    }
    Ok(out)
}

pub(crate) fn decompand_backward<T: Scalar>(y: &Tensor<T>, log_scale: &Tensor<T>, gout: &Tensor<T>) -> (Tensor<T>, Tensor<T>) {
    let p = y.positions();
    let mut gy = Tensor::zeros(y.shape());
    let mut gs = Tensor::zeros(log_scale.shape());
    for c in 0..y.channels() {
        let sigma = log_scale.data()[c].f64().exp();
        let mut acc = 0.0;
        for i in c * p..(c + 1) * p {
            let (dy, dlog) = companding::decompand_partials(y.data()[i].f64(), sigma);
            let g = gout.data()[i].f64();
            gy.data_mut()[i] = T::of(g * dy);
            acc += g * dlog;
        }
        gs.data_mut()[c] = T::of(acc);
    }
    (gy, gs)
}

pub fn mse<T: Scalar>(a: &Tensor<T>, b: &Tensor<T>) -> Result<T, DiffError> {
    if a.shape() != b.shape() {
        return Err(shape_err("mse", format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let n = a.numel() as f64;
    let s: f64 = a.data().iter().zip(b.data()).map(|(&p, &q)| (p - q).f64().powi(2)).sum();
    Ok(T::of(s / n))
}

/// Spatial mean per channel: `[C, ...] -> [C, 1]`.
pub fn mean_pool<T: Scalar>(x: &Tensor<T>) -> Tensor<T> {
    let p = x.positions();
    let inv = T::of(1.0 / p as f64);
    Tensor::from_fn(&[x.channels(), 1], |c| x.data()[c * p..(c + 1) * p].iter().copied().sum::<T>() * inv)
}

/// Numerically stable softmax over a flat logit vector.
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<f64> {
    let max = logits.iter().map(|v| v.f64()).fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v.f64() - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
