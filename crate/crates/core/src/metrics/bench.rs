use std::time::Instant;

/// Throughput statistics in millions of samples (or pixels) per second.
#[derive(Clone, Debug, PartialEq)]
pub struct Throughput {
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThroughputReport {
    /// `MPix/s` or `MSamp/s`.
    pub unit: &'static str,
    pub encode: Throughput,
    pub decode: Throughput,
}

impl ThroughputReport {
    pub fn ratio(&self) -> f64 {
        self.encode.median / self.decode.median
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, f) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - f) + sorted[i + 1] * f
    } else {
        sorted[i]
    }
}

fn stats(mut rates: Vec<f64>) -> Throughput {
    rates.sort_by(f64::total_cmp);
    Throughput {
        median: percentile(&rates, 0.5),
        p10: percentile(&rates, 0.1),
        p90: percentile(&rates, 0.9),
        reps: rates.len(),
    }
}

fn rate(units: usize, f: &mut impl FnMut()) -> f64 {
    let t = Instant::now();
    f();
    units as f64 / t.elapsed().as_secs_f64().max(1e-9) / 1e6
}

/// Times `f` over `reps` (at least 5) runs after one warm-up run. Each run
/// processes `units` samples; elapsed time is floored at one nanosecond.
pub fn bench<F: FnMut()>(mut f: F, units: usize, reps: usize) -> Throughput {
    f();
    stats((0..reps.max(5)).map(|_| rate(units, &mut f)).collect())
}

/// Benchmarks an encoder and a decoder with their repetitions interleaved,
/// so slow drift in machine speed affects both alike.
pub fn bench_codec<E: FnMut(), D: FnMut()>(
    mut encode: E,
    mut decode: D,
    units: usize,
    reps: usize,
    unit: &'static str,
) -> ThroughputReport {
    encode();
    decode();
    let (mut enc, mut dec) = (Vec::new(), Vec::new());
    for _ in 0..reps.max(5) {
        enc.push(rate(units, &mut encode));
        dec.push(rate(units, &mut decode));
    }
    ThroughputReport {
        unit,
        encode: stats(enc),
        decode: stats(dec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_work_is_finite() {
        let t = bench(|| {}, 1000, 5);
        assert!(t.median.is_finite() && t.median > 0.0);
        assert_eq!(t.reps, 5);
    }

    #[test]
    fn reps_floor_at_five() {
        let mut calls = 0;
        bench(|| calls += 1, 1, 2);
        assert_eq!(calls, 6);
    }

    #[test]
    fn codec_bench_alternates() {
        let log = std::cell::RefCell::new(Vec::new());
        let r = bench_codec(|| log.borrow_mut().push('e'), || log.borrow_mut().push('d'), 10, 5, "MPix/s");
        assert_eq!(log.borrow().iter().collect::<String>(), "ed".repeat(6));
        assert_eq!((r.encode.reps, r.decode.reps, r.unit), (5, 5, "MPix/s"));
    }

    #[test]
    fn percentiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert!((percentile(&v, 0.1) - 1.4).abs() < 1e-12);
    }
}
