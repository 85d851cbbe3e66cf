use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use walloc::bitstream::{compression_ratio, entropy_bits, rans_decode, rans_encode, read_container, write_container, ContainerMeta, FreqTable};
use walloc::codec::QuantizedLatent;
use walloc::Kind;

const GOLDEN: &[u8] = include_bytes!("data/golden.wllc");
const GOLDEN_LATENT: &[u8] = include_bytes!("data/golden_latent.bin");

#[test]
fn golden_container_decodes_bit_exactly() {
    let c_z = u16::from_le_bytes([GOLDEN_LATENT[0], GOLDEN_LATENT[1]]) as usize;
    let h = u32::from_le_bytes(GOLDEN_LATENT[2..6].try_into().unwrap()) as usize;
    let w = u32::from_le_bytes(GOLDEN_LATENT[6..10].try_into().unwrap()) as usize;
    let expect: Vec<i8> = GOLDEN_LATENT[10..].iter().map(|&b| b as i8).collect();
    let (q, meta) = read_container(GOLDEN).unwrap();
    assert_eq!((q.channels(), q.extents()), (c_z, &[h, w][..]));
    assert_eq!(q.data(), &expect[..]);
    assert_eq!(meta.original_extents, vec![61, 45]);
    assert_eq!(meta.scales, (0..12).map(|c| 0.25 * (c + 1) as f32).collect::<Vec<_>>());
    assert_eq!(write_container(&q, &meta).unwrap(), GOLDEN);
}

fn ggd_channel(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Vec<i8> {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..n)
        .map(|_| {
            let g: f64 = normal.sample(rng);
            // Heavier-than-Gaussian tails, like subband coefficients.
            (spread * g * g.abs().sqrt()).round().clamp(-127.0, 127.0) as i8
        })
        .collect()
}

#[test]
fn payload_near_entropy_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for &(n, spread) in &[(1024usize, 0.5), (4096, 3.0), (16384, 12.0), (65536, 40.0)] {
        let s = ggd_channel(&mut rng, n, spread);
        let t = FreqTable::build(&s).unwrap();
        let bytes = rans_encode(&s, &t).unwrap();
        let bound = 1.02 * entropy_bits(&s) / 8.0 + 16.0;
        assert!((bytes.len() as f64) <= bound, "n={n} spread={spread}: {} > {bound}", bytes.len());
        assert_eq!(rans_decode(&bytes, &t, n).unwrap(), s);
    }
}

#[test]
fn encoding_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let data: Vec<i8> = (0..4 * 16).map(|_| rng.random_range(-3..=3)).collect();
    let q = QuantizedLatent::new(4, &[16], data).unwrap();
    let meta = ContainerMeta {
        kind: Kind::OneD,
        levels: 5,
        c_x: 2,
        original_extents: vec![500],
        padded_extents: vec![512],
        scales: vec![1.0; 4],
    };
    let a = write_container(&q, &meta).unwrap();
    assert_eq!(a, write_container(&q, &meta).unwrap());
    // 2 channels x 500 samples x 2 bytes
    assert_eq!(compression_ratio(&meta, a.len()), 2000.0 / a.len() as f64);
}

fn latent_strategy() -> impl Strategy<Value = (QuantizedLatent, ContainerMeta)> {
    (1usize..6, 0u32..4, any::<bool>(), 1usize..5, 1usize..5, any::<u64>()).prop_map(|(c_z, levels, two_d, a, b, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (kind, lat) = if two_d { (Kind::TwoD, vec![a, b]) } else { (Kind::OneD, vec![a * b]) };
        let spread = rng.random_range(0.1..60.0);
        let n = c_z * lat.iter().product::<usize>();
        let q = QuantizedLatent::new(c_z, &lat, ggd_channel(&mut rng, n, spread)).unwrap();
        let padded: Vec<usize> = lat.iter().map(|e| e << levels).collect();
        let original = padded.iter().map(|&p| rng.random_range(1..=p)).collect();
        let meta = ContainerMeta {
            kind,
            levels,
            c_x: rng.random_range(1..4),
            original_extents: original,
            padded_extents: padded,
            scales: (0..c_z).map(|_| rng.random_range(0.01f32..10.0)).collect(),
        };
        (q, meta)
    })
}

proptest! {
    #[test]
    fn container_round_trip((q, meta) in latent_strategy()) {
        let bytes = write_container(&q, &meta).unwrap();
        let (q2, meta2) = read_container(&bytes).unwrap();
        prop_assert_eq!(q2, q);
        prop_assert_eq!(meta2, meta);
    }

    #[test]
    fn rans_round_trip(s in proptest::collection::vec(-127i8..=127, 1..2000)) {
        let t = FreqTable::build(&s).unwrap();
        let bytes = rans_encode(&s, &t).unwrap();
        prop_assert_eq!(rans_decode(&bytes, &t, s.len()).unwrap(), s);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let mut b = b"WLLC\x01".to_vec();
        b.extend(bytes);
        let _ = read_container(&b);
    }
}
