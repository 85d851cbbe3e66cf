use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{load_image, load_tensor, load_wav, DataError};
use crate::signal::{Kind, Signal};
use crate::wavelet::reflect;

/// Signals loaded from a directory, in file-name order.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub kind: Kind,
    pub items: Vec<Signal<f32>>,
    pub names: Vec<String>,
}

/// Loads every `.ppm`/`.pgm` (2D) or `.wav` (1D) file in `dir`, plus `.f32`
/// tensors of the matching dimensionality.
pub fn load_dir(dir: impl AsRef<Path>, kind: Kind) -> Result<Dataset, DataError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir.as_ref())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut items = Vec::new();
    let mut names = Vec::new();
    for p in paths {
        let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        let sig = match (kind, ext.as_str()) {
            (Kind::TwoD, "ppm" | "pgm") => load_image(&p)?,
            (Kind::OneD, "wav") => load_wav(&p)?,
            (_, "f32") => {
                let t = load_tensor(&p)?;
                if t.kind() != kind {
                    continue;
                }
                t
            }
            _ => continue,
        };
        names.push(p.file_name().unwrap_or_default().to_string_lossy().into_owned());
        items.push(sig);
    }
    if items.is_empty() {
        return Err(DataError::Shape(format!("no {kind:?} signals found in {}", dir.as_ref().display())));
    }
    Ok(Dataset { kind, items, names })
}

/// Seeded shuffle of `0..n` split into `(train, held_out)`. The held-out
/// part has `round(n * fraction)` items, at least one when `n > 1`.
pub fn split_indices(n: usize, held_out_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut k = (n as f64 * held_out_fraction.clamp(0.0, 1.0)).round() as usize;
    if n > 1 && held_out_fraction > 0.0 {
        k = k.clamp(1, n - 1);
    }
    let held = idx.split_off(n - k);
    (idx, held)
}

/// Draws `count` random crops of shape `extents` from `items`. Items smaller
/// than a patch are extended by symmetric reflection.
pub fn sample_patches(items: &[Signal<f32>], extents: &[usize], count: usize, seed: u64) -> Vec<Signal<f32>> {
    assert!(!items.is_empty(), "no signals to sample from");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ph, pw) = match extents {
        [n] => (1, *n),
        [h, w] => (*h, *w),
        _ => panic!("patches have one or two axes"),
    };
    (0..count)
        .map(|_| {
            let x = &items[rng.random_range(0..items.len())];
            let (h, w) = match x.extents() {
                [n] => (1, *n),
                [h, w] => (*h, *w),
                _ => unreachable!("signals have one or two axes"),
            };
            let oy = rng.random_range(0..=h.saturating_sub(ph));
            let ox = rng.random_range(0..=w.saturating_sub(pw));
            let mut data = Vec::with_capacity(x.channels() * ph * pw);
            for c in 0..x.channels() {
                let plane = x.channel(c);
                for y in 0..ph {
                    let sy = reflect((oy + y) as isize, h);
                    for xx in 0..pw {
                        data.push(plane[sy * w + reflect((ox + xx) as isize, w)]);
                    }
                }
            }
            Signal::new(x.channels(), extents, data).expect("patch shape is valid")
        })
        .collect()
}
