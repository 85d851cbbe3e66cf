use proptest::prelude::*;
use walloc::datasets::{
    crop, decode_pnm, decode_tensor, decode_wav, encode_pnm, encode_tensor, encode_wav, load_dir, pad_to_divisible,
    sample_patches, save_image, save_wav, split_indices, synth_image, SynthImageParams,
};
use walloc::{Kind, Signal};

fn p6(w: usize, h: usize, pixels: &[u8]) -> Vec<u8> {
    let mut b = format!("P6\n{w} {h}\n255\n").into_bytes();
    b.extend_from_slice(pixels);
    b
}

#[test]
fn black_image_and_endpoints() {
    let x = decode_pnm(&p6(2, 2, &[0; 12])).unwrap();
    assert_eq!((x.channels(), x.extents()), (3, &[2usize, 2][..]));
    assert!(x.data().iter().all(|&v| v == -1.0));
    let y = decode_pnm(&p6(1, 1, &[255, 0, 255])).unwrap();
    assert_eq!(y.data(), &[1.0, -1.0, 1.0]);
}

#[test]
fn square_wave_and_stereo() {
    let mut pcm = Vec::new();
    for t in 0..8 {
        let v: i16 = if t % 2 == 0 { 32767 } else { -32767 };
        pcm.extend_from_slice(&v.to_le_bytes());
        pcm.extend_from_slice(&(-v).to_le_bytes());
    }
    let mut bytes = b"RIFF".to_vec();
    bytes.extend_from_slice(&(36 + pcm.len() as u32).to_le_bytes());
    bytes.extend_from_slice(b"WAVEfmt \x10\0\0\0\x01\0\x02\0");
    bytes.extend_from_slice(&8000u32.to_le_bytes());
    bytes.extend_from_slice(&32000u32.to_le_bytes());
    bytes.extend_from_slice(b"\x04\0\x10\0data");
    bytes.extend_from_slice(&(pcm.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&pcm);
    let y = decode_wav(&bytes).unwrap();
    assert_eq!(y.channels(), 2);
    let full = 32767.0 / 32768.0;
    for t in 0..8 {
        let s = if t % 2 == 0 { full } else { -full };
        assert_eq!((y.channel(0)[t], y.channel(1)[t]), (s, -s));
    }
    assert_eq!(encode_wav(&y, 8000).unwrap(), bytes);
}

#[test]
fn pad_then_crop_restores_extents() {
    let x = synth_image(&SynthImageParams { height: 50, width: 37, ..Default::default() }, 3);
    let (p, orig) = pad_to_divisible(&x, 3);
    assert_eq!(p.extents(), &[56, 40]);
    assert_eq!(orig, vec![50, 37]);
    assert_eq!(crop(&p, &orig), x);
    let (q, _) = pad_to_divisible(&p, 3);
    assert_eq!(q, p);
}

#[test]
fn load_dir_reads_sorted_files_of_the_requested_kind() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth_image(&SynthImageParams { height: 8, width: 8, ..Default::default() }, 1);
    let b = synth_image(&SynthImageParams { height: 8, width: 8, ..Default::default() }, 2);
    save_image(dir.path().join("b.ppm"), &b).unwrap();
    save_image(dir.path().join("a.ppm"), &a).unwrap();
    save_wav(dir.path().join("c.wav"), &Signal::new(1, &[4], vec![0.0; 4]).unwrap(), 8000).unwrap();
    std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
    let ds = load_dir(dir.path(), Kind::TwoD).unwrap();
    assert_eq!(ds.names, vec!["a.ppm", "b.ppm"]);
    let q = |s: &Signal<f32>| s.map(|v| ((v + 1.0) * 127.5).round());
    assert_eq!(q(&ds.items[0]), q(&a));
    assert_eq!(load_dir(dir.path(), Kind::OneD).unwrap().items.len(), 1);
}

#[test]
fn splits_and_patches_are_seeded() {
    assert_eq!(split_indices(100, 0.1, 5), split_indices(100, 0.1, 5));
    let items = vec![synth_image(&SynthImageParams::default(), 0)];
    let a = sample_patches(&items, &[32, 32], 4, 9);
    assert_eq!(a, sample_patches(&items, &[32, 32], 4, 9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pnm_round_trip_is_byte_exact(w in 1usize..9, h in 1usize..9, gray in any::<bool>(), seed in any::<u64>()) {
        let c = if gray { 1 } else { 3 };
        let mut s = seed;
        let pixels: Vec<u8> = (0..w * h * c).map(|_| { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 56) as u8 }).collect();
        let mut bytes = format!("{}\n{w} {h}\n255\n", if gray { "P5" } else { "P6" }).into_bytes();
        bytes.extend_from_slice(&pixels);
        let x = decode_pnm(&bytes).unwrap();
        prop_assert_eq!(encode_pnm(&x).unwrap(), bytes);
    }

    #[test]
    fn wav_round_trip_within_one_lsb(v in prop::collection::vec(-1.0f32..1.0, 2..64), stereo in any::<bool>()) {
        let c = if stereo { 2 } else { 1 };
        let n = v.len() / c;
        let x = Signal::new(c, &[n], v[..n * c].to_vec()).unwrap();
        let y = decode_wav(&encode_wav(&x, 22050).unwrap()).unwrap();
        for (a, b) in x.data().iter().zip(y.data()) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0);
        }
    }

    #[test]
    fn tensor_round_trip_is_exact(v in prop::collection::vec(-10.0f32..10.0, 1..40), two_d in any::<bool>()) {
        let x = if two_d {
            Signal::new(1, &[1, v.len()], v.clone()).unwrap()
        } else {
            Signal::new(1, &[v.len()], v.clone()).unwrap()
        };
        prop_assert_eq!(decode_tensor(&encode_tensor(&x)).unwrap(), x);
    }

    #[test]
    fn parsers_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..128)) {
        let _ = decode_pnm(&bytes);
        let _ = decode_wav(&bytes);
        let _ = decode_tensor(&bytes);
    }

    #[test]
    fn padding_reaches_the_next_multiple(h in 1usize..40, w in 1usize..40, j in 0u32..4) {
        let x = Signal::new(1, &[h, w], vec![0.5; h * w]).unwrap();
        let (p, orig) = pad_to_divisible(&x, j);
        let m = 1usize << j;
        prop_assert_eq!(p.extents(), &[h.div_ceil(m) * m, w.div_ceil(m) * m][..]);
        prop_assert_eq!(crop(&p, &orig), x);
    }
}
