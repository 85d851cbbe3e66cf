use crate::signal::Signal;
use crate::wavelet::reflect;

/// Extends every axis at its end by whole-sample symmetric reflection up to
/// the next multiple of `2^levels`. Returns the padded signal and the
/// original extents.
pub fn pad_to_divisible(x: &Signal<f32>, levels: u32) -> (Signal<f32>, Vec<usize>) {
    let block = 1usize << levels;
    let original = x.extents().to_vec();
    let padded: Vec<usize> = original.iter().map(|e| e.div_ceil(block) * block).collect();
    if padded == original {
        return (x.clone(), original);
    }
    let (h, w, ph, pw) = match original[..] {
        [n] => (1, n, 1, padded[0]),
        [h, w] => (h, w, padded[0], padded[1]),
        _ => unreachable!("signals have one or two axes"),
    };
    let mut data = Vec::with_capacity(x.channels() * ph * pw);
    for c in 0..x.channels() {
        let plane = x.channel(c);
        for y in 0..ph {
            let sy = reflect(y as isize, h);
            for xx in 0..pw {
                data.push(plane[sy * w + reflect(xx as isize, w)]);
            }
        }
    }
    (Signal::new(x.channels(), &padded, data).expect("padded shape is valid"), original)
}

/// Keeps the leading `extents` of every axis.
pub fn crop(x: &Signal<f32>, extents: &[usize]) -> Signal<f32> {
    assert_eq!(extents.len(), x.extents().len(), "crop keeps the number of axes");
    assert!(extents.iter().zip(x.extents()).all(|(a, b)| a <= b), "crop cannot grow a signal");
    let (w, nh, nw) = match (x.extents(), extents) {
        ([n], [m]) => (*n, 1, *m),
        ([_, w], [h2, w2]) => (*w, *h2, *w2),
        _ => unreachable!("signals have one or two axes"),
    };
    let mut data = Vec::with_capacity(x.channels() * nh * nw);
    for c in 0..x.channels() {
        let plane = x.channel(c);
        for y in 0..nh {
            data.extend_from_slice(&plane[y * w..y * w + nw]);
        }
    }
    Signal::new(x.channels(), extents, data).expect("cropped shape is valid")
}
