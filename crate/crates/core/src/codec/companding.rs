//! Gaussian-CDF companding onto the signed 8-bit range, and the quantizer.

use crate::normal;

/// Output range of the compander before rounding: `255 * (Phi - 0.5)`.
pub const GAIN: f64 = 255.0;
/// Largest magnitude the compander emits. Keeps outputs strictly inside
/// `(-127.5, 127.5)` even when `Phi` saturates to 0 or 1 in floating point.
pub const LIMIT: f64 = 127.499_99;
/// Largest quantized magnitude.
pub const QMAX: i32 = 127;
/// Probability clamp applied before the inverse CDF.
pub const EPS: f64 = 1e-6;

pub fn compand_value(z: f64, sigma: f64) -> f64 {
    (GAIN * (normal::cdf(z / sigma) - 0.5)).clamp(-LIMIT, LIMIT)
}

/// Partial derivatives of [`compand_value`] with respect to `z` and to
/// `log sigma`.
pub fn compand_partials(z: f64, sigma: f64) -> (f64, f64) {
    let u = z / sigma;
    let d = GAIN * normal::pdf(u);
    (d / sigma, -d * u)
}

pub fn decompand_value(y: f64, sigma: f64) -> f64 {
    sigma * normal::inv_cdf((y / GAIN + 0.5).clamp(EPS, 1.0 - EPS))
}

/// Partial derivatives of [`decompand_value`] with respect to `y` and to
/// `log sigma`. Zero in `y` where the probability clamp is active.
pub fn decompand_partials(y: f64, sigma: f64) -> (f64, f64) {
    let p = y / GAIN + 0.5;
    let x = normal::inv_cdf(p.clamp(EPS, 1.0 - EPS));
    let dy = if p > EPS && p < 1.0 - EPS {
        sigma / (GAIN * normal::pdf(x))
    } else {
        0.0
    };
    (dy, sigma * x)
}

/// Rounds half away from zero and clamps to `[-127, 127]`. Non-finite
/// inputs map to 0 (NaN) or the nearest bound.
pub fn quantize_value(y: f64) -> i8 {
    if y.is_nan() {
        return 0;
    }
    y.round().clamp(-(QMAX as f64), QMAX as f64) as i8
}
