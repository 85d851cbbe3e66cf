use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{bottleneck_noise, training_graph};
use super::{CodecConfig, CodecError, CodecModel, TrainOptions};
use crate::diffcore::{Adam, Tape, Tensor};
use crate::signal::Signal;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    /// `(step, mean loss over the preceding window)`.
    pub loss_history: Vec<(usize, f64)>,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub elapsed: Duration,
}

fn check_patches(cfg: &CodecConfig, patches: &[Signal<f32>]) -> Result<(), CodecError> {
    let first = patches.first().ok_or_else(|| CodecError::Shape("no training patches".into()))?;
    for p in patches {
        if p.kind() != cfg.kind || p.channels() != cfg.c_x || p.extents() != first.extents() {
            return Err(CodecError::Shape(format!(
                "patches must share one shape with {} channels; got {}x{:?}",
                cfg.c_x,
                p.channels(),
                p.extents()
            )));
        }
    }
    if let Some(&e) = first.extents().iter().find(|&&e| e % cfg.block() != 0) {
        return Err(CodecError::Shape(format!("patch extent {e} is not divisible by {}", cfg.block())));
    }
    Ok(())
}

/// Trains a fresh codec on fixed-size patches with Adam on the reconstruction
/// MSE. Deterministic for a given seed.
pub fn train(cfg: &CodecConfig, patches: &[Signal<f32>], opts: &TrainOptions) -> Result<(CodecModel, TrainReport), CodecError> {
    train_with(cfg, patches, opts, |_, _| {})
}

/// As [`train`], calling `on_log(step, mean_loss)` whenever a loss-history
/// entry is recorded.
pub fn train_with(
    cfg: &CodecConfig,
    patches: &[Signal<f32>],
    opts: &TrainOptions,
    mut on_log: impl FnMut(usize, f64),
) -> Result<(CodecModel, TrainReport), CodecError> {
    check_patches(cfg, patches)?;
    let start = Instant::now();
    let mut model = CodecModel::new(cfg.clone(), opts.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed_da7a);
    let mut adam = Adam::new(opts.lr);
    let log_every = opts.log_every.max(1);
    let mut history = Vec::new();
    let mut initial_loss = f64::NAN;
    let mut window = (0.0, 0usize);
    let inv_batch = 1.0 / opts.batch_size as f32;

    for step in 1..=opts.steps {
        let mut grads: Vec<Tensor<f32>> = model.params.tensors().iter().map(|t| Tensor::zeros(t.shape())).collect();
        let mut batch_loss = 0.0;
        for _ in 0..opts.batch_size {
            let x = &patches[rng.random_range(0..patches.len())];
            let mut tape = Tape::new();
            let vars = model.params.bind(&mut tape);
            let xv = tape.leaf(Tensor::from_signal(x));
            let latent_shape = {
                let mut s = vec![cfg.c_z];
                s.extend(x.extents().iter().map(|e| e / cfg.block()));
                s
            };
            let noise = bottleneck_noise(&latent_shape, cfg.noise_width, &mut rng);
            let recon = training_graph(&mut tape, cfg, &vars, xv, Some(&noise))?;
            let loss = tape.mse(recon, xv)?;
            let lv = tape.value(loss)?.data()[0] as f64;
            if !lv.is_finite() {
                return Err(CodecError::Diverged { step, loss: lv });
            }
            batch_loss += lv;
            let mut g = tape.backward(loss)?;
            for (acc, v) in grads.iter_mut().zip(&vars) {
                if let Some(t) = g.take(*v) {
                    acc.add_assign(&t);
                }
            }
        }
        for g in &mut grads {
            g.scale(inv_batch);
        }
        batch_loss /= opts.batch_size as f64;
        if step == 1 {
            initial_loss = batch_loss;
        }
        adam.step(&mut model.params.tensors_mut(), &grads).map_err(|_| CodecError::Diverged { step, loss: batch_loss })?;
        window.0 += batch_loss;
        window.1 += 1;
        if step % log_every == 0 || step == opts.steps {
            let mean = window.0 / window.1 as f64;
            history.push((step, mean));
            on_log(step, mean);
            window = (0.0, 0);
        }
    }
    let final_loss = history.last().map(|h| h.1).unwrap_or(f64::NAN);
    Ok((
        model,
        TrainReport {
            loss_history: history,
            initial_loss,
            final_loss,
            elapsed: start.elapsed(),
        },
    ))
}
