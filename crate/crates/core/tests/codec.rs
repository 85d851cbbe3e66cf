use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walloc::codec::{bottleneck_noise, train, training_graph, CodecConfig, CodecModel, ModelParams, QuantizedLatent, TrainOptions};
use walloc::diffcore::{grad_check_probes, Tensor};
use walloc::{Kind, Signal};

fn random_signal(seed: u64, channels: usize, extents: &[usize]) -> Signal<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = channels * extents.iter().product::<usize>();
    Signal::new(channels, extents, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn small_image(c_z: usize) -> CodecConfig {
    CodecConfig {
        c_hidden: 8,
        depth: 1,
        c_z,
        ..CodecConfig::image_16x()
    }
}

#[test]
fn latent_geometry_for_image_and_audio() {
    let m = CodecModel::new(small_image(12), 1).unwrap();
    let z = m.analyze(&random_signal(1, 3, &[256, 256])).unwrap();
    assert_eq!((z.channels(), z.extents()), (12, &[32usize, 32][..]));
    assert_eq!(m.config.dimensionality_reduction(), 16.0);

    let cfg = CodecConfig {
        c_hidden: 4,
        depth: 0,
        ..CodecConfig::audio_5x()
    };
    let m = CodecModel::new(cfg, 1).unwrap();
    let z = m.analyze(&random_signal(2, 2, &[65536])).unwrap();
    assert_eq!((z.channels(), z.extents()), (108, &[256usize][..]));
}

#[test]
fn zero_signal_gives_zero_latent() {
    let m = CodecModel::new(small_image(12), 4).unwrap();
    let z = m.analyze(&Signal::zeros(3, &[16, 16]).unwrap()).unwrap();
    assert!(z.data().iter().all(|&v| v == 0.0));
}

#[test]
fn encoder_is_linear() {
    let m = CodecModel::new(small_image(12), 5).unwrap();
    let x = random_signal(6, 3, &[32, 32]);
    let y = random_signal(7, 3, &[32, 32]);
    let (a, b) = (0.7f32, -1.3f32);
    let mix = Signal::new(3, &[32, 32], x.data().iter().zip(y.data()).map(|(p, q)| a * p + b * q).collect()).unwrap();
    let (zx, zy, zm) = (m.analyze(&x).unwrap(), m.analyze(&y).unwrap(), m.analyze(&mix).unwrap());
    for i in 0..zm.len() {
        let expect = a * zx.data()[i] + b * zy.data()[i];
        assert!((zm.data()[i] - expect).abs() < 1e-5 * (1.0 + expect.abs()), "i={i}");
    }
}

#[test]
fn fresh_decoder_outputs_zero_at_full_shape() {
    let m = CodecModel::new(small_image(12), 8).unwrap();
    let z = Signal::new(12, &[32, 32], vec![0.3; 12 * 1024]).unwrap();
    let x = m.synthesize(&z).unwrap();
    assert_eq!((x.channels(), x.extents()), (3, &[256usize, 256][..]));
    assert!(x.data().iter().all(|&v| v == 0.0));
}

#[test]
fn rejects_mismatched_inputs() {
    let m = CodecModel::new(small_image(12), 9).unwrap();
    assert!(m.analyze(&random_signal(1, 1, &[16, 16])).is_err());
    assert!(m.analyze(&random_signal(1, 3, &[20, 16])).is_err());
    assert!(m.synthesize(&Signal::zeros(5, &[2, 2]).unwrap()).is_err());
    assert!(CodecModel::new(CodecConfig { c_z: 500, ..CodecConfig::image_4x() }, 0).is_err());
}

#[test]
fn probe_basis_gallery_shapes() {
    let m = CodecModel::new(small_image(12), 10).unwrap();
    let gallery = m.probe_basis(31).unwrap();
    assert_eq!(gallery.len(), 12);
    for g in &gallery {
        assert_eq!((g.channels(), g.extents()), (3, &[24usize, 24][..]));
    }
}

#[test]
fn bottleneck_noise_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = bottleneck_noise(&[1_000_000], 1.0, &mut rng);
    let mean = n.data().iter().map(|&v| v as f64).sum::<f64>() / 1e6;
    assert!(mean.abs() < 0.002, "mean {mean}");
    assert!(n.data().iter().all(|v| (-0.5..=0.5).contains(v)));
    let zero = bottleneck_noise(&[100], 0.0, &mut rng);
    assert!(zero.data().iter().all(|&v| v == 0.0));
}

#[test]
fn full_training_graph_gradients() {
    let cfg = CodecConfig {
        kind: Kind::TwoD,
        c_x: 3,
        levels: 1,
        c_z: 6,
        c_hidden: 8,
        depth: 1,
        noise_width: 1.0,
    };
    let mut params = ModelParams::<f64>::init(&cfg, 12);
    // A non-zero exit layer so gradients reach the whole graph.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for v in params.exit.weight.data_mut() {
        *v = rng.random_range(-0.3..0.3);
    }
    let mut inputs: Vec<Tensor<f64>> = params.tensors().into_iter().cloned().collect();
    let x = Tensor::from_fn(&[3, 16, 16], |_| rng.random_range(-1.0..1.0));
    let noise = bottleneck_noise(&[6, 8, 8], 1.0, &mut rng).cast::<f64>();
    inputs.push(x);
    let n_params = inputs.len() - 1;
    let probes: Vec<(usize, usize)> = (0..10)
        .map(|_| {
            let k = rng.random_range(0..n_params);
            (k, rng.random_range(0..inputs[k].numel()))
        })
        .collect();
    let report = grad_check_probes(
        |tape, vars| {
            let recon = training_graph(tape, &cfg, &vars[..n_params], vars[n_params], Some(&noise))?;
            tape.mse(recon, vars[n_params])
        },
        &inputs,
        1e-4,
        &probes,
    )
    .unwrap();
    assert!(report.max_rel_error < 1e-3, "{report:?}");
}

fn smooth_patches(n: usize, seed: u64) -> Vec<Signal<f32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (fx, fy, ph) = (rng.random_range(0.05..0.4), rng.random_range(0.05..0.4), rng.random_range(0.0..std::f32::consts::TAU));
            let data = (0..32 * 32)
                .map(|i| 0.8 * ((i % 32) as f32 * fx + (i / 32) as f32 * fy + ph).sin())
                .collect();
            Signal::new(1, &[32, 32], data).unwrap()
        })
        .collect()
}

#[test]
fn training_smoke_reduces_loss() {
    let cfg = CodecConfig {
        kind: Kind::TwoD,
        c_x: 1,
        levels: 2,
        c_z: 8,
        c_hidden: 16,
        depth: 1,
        noise_width: 1.0,
    };
    let opts = TrainOptions {
        steps: 200,
        batch_size: 4,
        lr: 1e-3,
        seed: 3,
        log_every: 50,
    };
    let patches = smooth_patches(64, 14);
    let (_, report) = train(&cfg, &patches, &opts).unwrap();
    assert_eq!(report.loss_history.len(), 4);
    assert!(report.final_loss < report.initial_loss, "{report:?}");
}

#[test]
fn training_is_deterministic() {
    let cfg = CodecConfig {
        kind: Kind::TwoD,
        c_x: 1,
        levels: 1,
        c_z: 2,
        c_hidden: 4,
        depth: 1,
        noise_width: 1.0,
    };
    let opts = TrainOptions {
        steps: 5,
        batch_size: 2,
        lr: 1e-3,
        seed: 4,
        log_every: 1,
    };
    let patches = smooth_patches(8, 15);
    let (a, ra) = train(&cfg, &patches, &opts).unwrap();
    let (b, rb) = train(&cfg, &patches, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(ra.loss_history, rb.loss_history);
}

#[test]
fn huge_learning_rate_reports_divergence() {
    let cfg = CodecConfig {
        kind: Kind::TwoD,
        c_x: 1,
        levels: 1,
        c_z: 2,
        c_hidden: 4,
        depth: 1,
        noise_width: 1.0,
    };
    let opts = TrainOptions {
        steps: 200,
        batch_size: 2,
        lr: 1e12,
        seed: 4,
        log_every: 10,
    };
    match train(&cfg, &smooth_patches(8, 16), &opts) {
        Err(walloc::codec::CodecError::Diverged { .. }) | Err(walloc::codec::CodecError::Diff(_)) => {}
        other => panic!("expected divergence, got {:?}", other.map(|r| r.1)),
    }
}

proptest! {
    #[test]
    fn quantized_values_stay_in_range(vals in proptest::collection::vec(prop::num::f32::ANY, 1..64)) {
        let n = vals.len();
        let q = QuantizedLatent::quantize(&Signal::new(1, &[n], vals.clone()).unwrap());
        for (&v, &qv) in vals.iter().zip(q.data()) {
            prop_assert!((-127..=127).contains(&qv));
            if v.is_finite() && v.abs() < 127.0 {
                prop_assert!((v - qv as f32).abs() <= 0.5);
            }
        }
    }

    #[test]
    fn companded_latents_stay_open(scale in -3.0f32..3.0, seed in 0u64..1000) {
        let mut m = CodecModel::new(small_image(12), 1).unwrap();
        m.params.log_scales.data_mut().fill(scale);
        let y = m.compand(&m.analyze(&random_signal(seed, 3, &[8, 8])).unwrap().map(|v| v * 1e3)).unwrap();
        prop_assert!(y.data().iter().all(|v| v.abs() < 127.5));
    }
}
