//! Regenerates the container test vector in `tests/data/`.

use std::path::Path;

use walloc::bitstream::{write_container, ContainerMeta};
use walloc::codec::QuantizedLatent;
use walloc::Kind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (c_z, h, w) = (12usize, 8usize, 6usize);
    // Laplacian-like values from a fixed LCG, independent of any RNG crate.
    let mut state: u32 = 0x1234_5678;
    let data: Vec<i8> = (0..c_z * h * w)
        .map(|i| {
            state = state.wrapping_mul(1_664_525).wrapping_add(1_013_904_223);
            let u = (state >> 8) as f64 / (1u32 << 24) as f64;
            let spread = 1.0 + (i / (h * w)) as f64;
            let v = -spread * (1.0 - u).ln() * if state & 1 == 0 { 1.0 } else { -1.0 };
            v.round().clamp(-127.0, 127.0) as i8
        })
        .collect();
    let q = QuantizedLatent::new(c_z, &[h, w], data)?;
    let meta = ContainerMeta {
        kind: Kind::TwoD,
        levels: 3,
        c_x: 3,
        original_extents: vec![61, 45],
        padded_extents: vec![64, 48],
        scales: (0..c_z).map(|c| 0.25 * (c + 1) as f32).collect(),
    };
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    std::fs::write(dir.join("golden.wllc"), write_container(&q, &meta)?)?;
    let mut raw = Vec::new();
    raw.extend_from_slice(&(c_z as u16).to_le_bytes());
    raw.extend_from_slice(&(h as u32).to_le_bytes());
    raw.extend_from_slice(&(w as u32).to_le_bytes());
    raw.extend(q.data().iter().map(|&v| v as u8));
    std::fs::write(dir.join("golden_latent.bin"), raw)?;
    Ok(())
}
