use super::{DiffError, Tape, Tensor, Var};

/// Largest disagreement between analytic and central-difference gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub checked: usize,
}

/// Compares reverse-mode gradients of `f` against central differences with
/// step `h`, perturbing every entry of every input. `f` builds a scalar loss
/// from the inputs placed on a fresh tape in order.
pub fn grad_check<F>(f: F, inputs: &[Tensor<f64>], h: f64) -> Result<GradCheckReport, DiffError>
where
    F: Fn(&mut Tape<f64>, &[Var]) -> Result<Var, DiffError>,
{
    let probes: Vec<(usize, usize)> =
        inputs.iter().enumerate().flat_map(|(k, t)| (0..t.numel()).map(move |j| (k, j))).collect();
    grad_check_probes(f, inputs, h, &probes)
}

/// As [`grad_check`] but only at the given `(input, flat index)` entries.
pub fn grad_check_probes<F>(f: F, inputs: &[Tensor<f64>], h: f64, probes: &[(usize, usize)]) -> Result<GradCheckReport, DiffError>
where
    F: Fn(&mut Tape<f64>, &[Var]) -> Result<Var, DiffError>,
{
    let eval = |xs: &[Tensor<f64>]| -> Result<(Tape<f64>, Vec<Var>, Var), DiffError> {
        let mut tape = Tape::new();
        let vars: Vec<Var> = xs.iter().map(|x| tape.leaf(x.clone())).collect();
        let loss = f(&mut tape, &vars)?;
        Ok((tape, vars, loss))
    };
    let loss_at = |xs: &[Tensor<f64>]| -> Result<f64, DiffError> {
        let (t, _, l) = eval(xs)?;
        Ok(t.value(l)?.data()[0])
    };
    let (tape, vars, loss) = eval(inputs)?;
    let grads = tape.backward(loss)?;
    let mut report = GradCheckReport {
        max_abs_error: 0.0,
        max_rel_error: 0.0,
        checked: 0,
    };
    let mut xs = inputs.to_vec();
    for &(k, j) in probes {
        let analytic = grads.get(vars[k]).map_or(0.0, |g| g.data()[j]);
        let orig = xs[k].data()[j];
        xs[k].data_mut()[j] = orig + h;
        let up = loss_at(&xs)?;
        xs[k].data_mut()[j] = orig - h;
        let down = loss_at(&xs)?;
        xs[k].data_mut()[j] = orig;
        let numeric = (up - down) / (2.0 * h);
        let abs = (analytic - numeric).abs();
        report.max_abs_error = report.max_abs_error.max(abs);
        report.max_rel_error = report.max_rel_error.max(abs / analytic.abs().max(numeric.abs()).max(REL_FLOOR));
        report.checked += 1;
    }
    Ok(report)
}

/// Gradients smaller than this are compared in absolute terms.
pub const REL_FLOOR: f64 = 1e-6;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(seed: u64, shape: &[usize]) -> Tensor<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Tensor::from_fn(shape, |_| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn linear_graph_is_exact() {
        let r = grad_check(
            |t, v| {
                let y = t.scale(v[0], 3.0)?;
                let s = t.add(y, v[1])?;
                let d = t.dense(s, v[2], v[3])?;
                t.mean_pool(d)
            },
            &[random(1, &[2, 6]), random(2, &[2, 6]), random(3, &[2, 1]), random(4, &[1])],
            1e-4,
        )
        .unwrap();
        assert!(r.max_abs_error < 1e-6, "{r:?}");
    }

    #[test]
    fn dense_and_silu() {
        let r = grad_check(
            |t, v| {
                let y = t.dense(v[0], v[1], v[2])?;
                let y = t.silu(y)?;
                t.mse(y, v[3])
            },
            &[random(3, &[3, 5]), random(4, &[3, 2]), random(5, &[2]), random(6, &[2, 5])],
            1e-4,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-3, "{r:?}");
    }

    #[test]
    fn conv2d_3x3() {
        let r = grad_check(
            |t, v| {
                let y = t.conv(v[0], v[1], v[2])?;
                t.mse(y, v[3])
            },
            &[random(7, &[2, 4, 5]), random(8, &[3, 2, 3, 3]), random(9, &[3]), random(10, &[3, 4, 5])],
            1e-4,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-3, "{r:?}");
    }

    #[test]
    fn conv1d_and_pointwise() {
        let r = grad_check(
            |t, v| {
                let y = t.conv(v[0], v[1], v[2])?;
                let y = t.conv(y, v[3], v[4])?;
                t.mse(y, v[5])
            },
            &[
                random(11, &[2, 9]),
                random(12, &[3, 2, 3]),
                random(13, &[3]),
                random(14, &[2, 3, 1]),
                random(15, &[2]),
                random(16, &[2, 9]),
            ],
            1e-4,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-3, "{r:?}");
    }

    #[test]
    fn compand_and_decompand() {
        let mut x = random(17, &[2, 6]);
        x.scale(2.0);
        let r = grad_check(
            |t, v| {
                let y = t.compand(v[0], v[1])?;
                let y = t.scale(y, 0.2)?;
                let z = t.decompand(y, v[2])?;
                t.mse(z, v[3])
            },
            &[x, random(18, &[2]), random(19, &[2]), random(20, &[2, 6])],
            1e-4,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-3, "{r:?}");
    }

    #[test]
    fn wavelet_round_trip_graph() {
        let r = grad_check(
            |t, v| {
                let y = t.wpt(v[0], 1)?;
                let y = t.silu(y)?;
                let y = t.iwpt(y, 1)?;
                t.mse(y, v[1])
            },
            &[random(21, &[1, 8, 8]), random(22, &[1, 8, 8])],
            1e-4,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-3, "{r:?}");
    }

    #[test]
    fn pooled_classifier_head() {
        let r = grad_check(
            |t, v| {
                let p = t.mean_pool(v[0])?;
                let o = t.dense(p, v[1], v[2])?;
                t.cross_entropy(o, 1)
            },
            &[random(23, &[3, 4, 4]), random(24, &[3, 2]), random(25, &[2])],
            1e-4,
        )
        .unwrap();
        assert!(r.max_rel_error < 1e-3, "{r:?}");
    }
}
