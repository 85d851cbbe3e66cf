use super::{DiffError, Scalar, Tensor};

/// Adam with bias correction. Moments are kept in f64.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Default for Adam {
    fn default() -> Self {
        Adam::new(1e-4)
    }
}

impl Adam {
    pub fn new(lr: f64) -> Self {
        Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update. `params[i]` and `grads[i]` must correspond across
    /// calls. Nothing is modified when any gradient is non-finite.
    pub fn step<T: Scalar>(&mut self, params: &mut [&mut Tensor<T>], grads: &[Tensor<T>]) -> Result<(), DiffError> {
        assert_eq!(params.len(), grads.len(), "one gradient per parameter");
        if let Some(i) = grads.iter().position(|g| !g.all_finite()) {
            return Err(DiffError::NonFiniteGradient(i));
        }
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.numel()]).collect();
            self.v = self.m.clone();
        }
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            for (j, (w, &gj)) in p.data_mut().iter_mut().zip(g.data()).enumerate() {
                let gj = gj.f64();
                m[j] = self.beta1 * m[j] + (1.0 - self.beta1) * gj;
                v[j] = self.beta2 * v[j] + (1.0 - self.beta2) * gj * gj;
                let update = self.lr * (m[j] / c1) / ((v[j] / c2).sqrt() + self.eps);
                *w = T::of(w.f64() - update);
            }
        }
        Ok(())
    }
}
