use super::{ops, shape_err, DiffError, Scalar, Tensor};
use crate::wavelet::{self, FilterBank, SubbandTensor};

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(pub(crate) usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Debug)]
enum Op {
    Leaf,
    Dense { x: Var, w: Var, b: Var },
    Conv { x: Var, w: Var, b: Var },
    Silu(Var),
    Add(Var, Var),
    AddConst(Var),
    ScaleConst(Var, f64),
    Compand { x: Var, s: Var },
    Decompand { y: Var, s: Var },
    Wpt(Var),
    Iwpt { x: Var, levels: u32 },
    Mse(Var, Var),
    MeanPool(Var),
    CrossEntropy { logits: Var, label: usize },
    Round(#[allow(dead_code)] Var),
}

impl Op {
    fn name(&self) -> &'static str {
        match self {
            Op::Leaf => "leaf",
            Op::Dense { .. } => "dense",
            Op::Conv { .. } => "conv",
            Op::Silu(_) => "silu",
            Op::Add(..) => "add",
            Op::AddConst(_) => "add_const",
            Op::ScaleConst(..) => "scale",
            Op::Compand { .. } => "compand",
            Op::Decompand { .. } => "decompand",
            Op::Wpt(_) => "wpt",
            Op::Iwpt { .. } => "iwpt",
            Op::Mse(..) => "mse",
            Op::MeanPool(_) => "mean_pool",
            Op::CrossEntropy { .. } => "cross_entropy",
            Op::Round(_) => "round",
        }
    }
}

struct Node<T> {
    op: Op,
    value: Tensor<T>,
}

/// Records a forward computation for one sample and differentiates it.
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
    fb: FilterBank,
    poisoned: Option<(usize, &'static str)>,
}

/// Gradients of a scalar loss with respect to every node on a tape.
pub struct Gradients<T> {
    grads: Vec<Option<Tensor<T>>>,
}

impl<T: Scalar> Gradients<T> {
    /// Gradient for `v`, or `None` when the loss does not depend on it.
    pub fn get(&self, v: Var) -> Option<&Tensor<T>> {
        self.grads.get(v.0).and_then(|g| g.as_ref())
    }

    pub fn take(&mut self, v: Var) -> Option<Tensor<T>> {
        self.grads.get_mut(v.0).and_then(|g| g.take())
    }
}

impl<T: Scalar> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Tape {
            nodes: Vec::new(),
            fb: wavelet::make_cdf97_filterbank(),
            poisoned: None,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Tensor<T>) -> Var {
        let id = self.nodes.len();
        if self.poisoned.is_none() && !value.all_finite() {
            self.poisoned = Some((id, op.name()));
        }
        self.nodes.push(Node { op, value });
        Var(id)
    }

    fn val(&self, v: Var) -> Result<&Tensor<T>, DiffError> {
        self.nodes.get(v.0).map(|n| &n.value).ok_or(DiffError::NoForward(v.0))
    }

    pub fn value(&self, v: Var) -> Result<&Tensor<T>, DiffError> {
        self.val(v)
    }

    pub fn leaf(&mut self, value: Tensor<T>) -> Var {
        self.push(Op::Leaf, value)
    }

    pub fn dense(&mut self, x: Var, w: Var, b: Var) -> Result<Var, DiffError> {
        let out = ops::dense_forward(self.val(x)?, self.val(w)?, self.val(b)?)?;
        Ok(self.push(Op::Dense { x, w, b }, out))
    }

    pub fn conv(&mut self, x: Var, w: Var, b: Var) -> Result<Var, DiffError> {
        let out = ops::conv_forward(self.val(x)?, self.val(w)?, self.val(b)?)?;
        Ok(self.push(Op::Conv { x, w, b }, out))
    }

    pub fn silu(&mut self, x: Var) -> Result<Var, DiffError> {
        let out = ops::silu_forward(self.val(x)?);
        Ok(self.push(Op::Silu(x), out))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, DiffError> {
        let (va, vb) = (self.val(a)?, self.val(b)?);
        if va.shape() != vb.shape() {
            return Err(shape_err("add", format!("{:?} vs {:?}", va.shape(), vb.shape())));
        }
        let mut out = va.clone();
        out.add_assign(vb);
        Ok(self.push(Op::Add(a, b), out))
    }

    /// Adds a constant tensor (for example sampled noise) that receives no
    /// gradient.
    pub fn add_const(&mut self, x: Var, c: &Tensor<T>) -> Result<Var, DiffError> {
        let vx = self.val(x)?;
        if vx.shape() != c.shape() {
            return Err(shape_err("add_const", format!("{:?} vs {:?}", vx.shape(), c.shape())));
        }
        let mut out = vx.clone();
        out.add_assign(c);
        Ok(self.push(Op::AddConst(x), out))
    }

    pub fn scale(&mut self, x: Var, s: f64) -> Result<Var, DiffError> {
        let mut out = self.val(x)?.clone();
        out.scale(T::of(s));
        Ok(self.push(Op::ScaleConst(x, s), out))
    }

    pub fn compand(&mut self, x: Var, log_scale: Var) -> Result<Var, DiffError> {
        let out = ops::compand_forward(self.val(x)?, self.val(log_scale)?)?;
        Ok(self.push(Op::Compand { x, s: log_scale }, out))
    }

    pub fn decompand(&mut self, y: Var, log_scale: Var) -> Result<Var, DiffError> {
        let out = ops::decompand_forward(self.val(y)?, self.val(log_scale)?)?;
        Ok(self.push(Op::Decompand { y, s: log_scale }, out))
    }

    /// Forward wavelet packet transform, `[C, ...] -> [C * 2^(dJ), ...]`.
    pub fn wpt(&mut self, x: Var, levels: u32) -> Result<Var, DiffError> {
        let sig = self.val(x)?.to_signal();
        let sb = wavelet::wpt_forward(&sig, levels, &self.fb).map_err(|e| shape_err("wpt", e.to_string()))?;
        let out = Tensor::from_signal(sb.coeffs());
        Ok(self.push(Op::Wpt(x), out))
    }

    pub fn iwpt(&mut self, x: Var, levels: u32) -> Result<Var, DiffError> {
        let sig = self.val(x)?.to_signal();
        let sb = SubbandTensor::new(sig, levels).map_err(|e| shape_err("iwpt", e.to_string()))?;
        let out = Tensor::from_signal(&wavelet::wpt_inverse(&sb, &self.fb));
        Ok(self.push(Op::Iwpt { x, levels }, out))
    }

    pub fn mse(&mut self, a: Var, b: Var) -> Result<Var, DiffError> {
        let loss = ops::mse(self.val(a)?, self.val(b)?)?;
        Ok(self.push(Op::Mse(a, b), Tensor::scalar(loss)))
    }

    pub fn mean_pool(&mut self, x: Var) -> Result<Var, DiffError> {
        let out = ops::mean_pool(self.val(x)?);
        Ok(self.push(Op::MeanPool(x), out))
    }

    /// Softmax cross-entropy of a flat logit vector against a class index.
    pub fn cross_entropy(&mut self, logits: Var, label: usize) -> Result<Var, DiffError> {
        let v = self.val(logits)?;
        if label >= v.numel() {
            return Err(shape_err("cross_entropy", format!("label {label} for {} classes", v.numel())));
        }
        let p = ops::softmax(v.data());
        let loss = -p[label].max(f64::MIN_POSITIVE).ln();
        Ok(self.push(Op::CrossEntropy { logits, label }, Tensor::scalar(T::of(loss))))
    }

    /// Rounds half away from zero. Has no gradient; backward through it fails.
    pub fn round(&mut self, x: Var) -> Result<Var, DiffError> {
        let mut out = self.val(x)?.clone();
        for v in out.data_mut() {
            *v = v.round();
        }
        Ok(self.push(Op::Round(x), out))
    }

    pub fn backward(&self, loss: Var) -> Result<Gradients<T>, DiffError> {
        let lv = self.val(loss)?;
        if lv.numel() != 1 {
            return Err(DiffError::NotScalar(lv.shape().to_vec()));
        }
        if let Some((node, op)) = self.poisoned {
            if node <= loss.0 {
                return Err(DiffError::NonFinite { node, op });
            }
        }
        let mut grads: Vec<Option<Tensor<T>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::full(lv.shape(), T::one()));

        fn acc<T: Scalar>(grads: &mut [Option<Tensor<T>>], v: Var, g: Tensor<T>) {
            match &mut grads[v.0] {
                Some(t) => t.add_assign(&g),
                slot => *slot = Some(g),
            }
        }

        for id in (0..=loss.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &self.nodes[id];
            match node.op {
                Op::Leaf => {
                    grads[id] = Some(g);
                    continue;
                }
                Op::Dense { x, w, b } => {
                    let (gx, gw, gb) = ops::dense_backward(self.val(x)?, self.val(w)?, &g);
                    acc(&mut grads, x, gx);
                    acc(&mut grads, w, gw);
                    acc(&mut grads, b, gb);
                }
                Op::Conv { x, w, b } => {
                    let (gx, gw, gb) = ops::conv_backward(self.val(x)?, self.val(w)?, self.val(b)?, &g);
                    acc(&mut grads, x, gx);
                    acc(&mut grads, w, gw);
                    acc(&mut grads, b, gb);
                }
                Op::Silu(x) => acc(&mut grads, x, ops::silu_backward(self.val(x)?, &g)),
                Op::Add(a, b) => {
                    acc(&mut grads, a, g.clone());
                    acc(&mut grads, b, g);
                }
                Op::AddConst(x) => acc(&mut grads, x, g),
                Op::ScaleConst(x, s) => {
                    let mut g = g;
                    g.scale(T::of(s));
                    acc(&mut grads, x, g);
                }
                Op::Compand { x, s } => {
                    let (gx, gs) = ops::compand_backward(self.val(x)?, self.val(s)?, &g);
                    acc(&mut grads, x, gx);
                    acc(&mut grads, s, gs);
                }
                Op::Decompand { y, s } => {
                    let (gy, gs) = ops::decompand_backward(self.val(y)?, self.val(s)?, &g);
                    acc(&mut grads, y, gy);
                    acc(&mut grads, s, gs);
                }
                Op::Wpt(x) => {
                    let levels = {
                        let (cin, cout) = (self.val(x)?.channels(), node.value.channels());
                        let dims = node.value.shape().len() - 1;
                        levels_from_channels(cin, cout, dims)
                    };
                    let sb = SubbandTensor::new(g.to_signal(), levels).map_err(|e| shape_err("wpt", e.to_string()))?;
                    let gx = wavelet::wpt_forward_adjoint(&sb, &self.fb);
                    acc(&mut grads, x, Tensor::from_signal(&gx));
                }
                Op::Iwpt { x, levels } => {
                    let sb = wavelet::wpt_inverse_adjoint(&g.to_signal(), levels, &self.fb)
                        .map_err(|e| shape_err("iwpt", e.to_string()))?;
                    acc(&mut grads, x, Tensor::from_signal(sb.coeffs()));
                }
                Op::Mse(a, b) => {
                    let (va, vb) = (self.val(a)?, self.val(b)?);
                    let k = g.data()[0] * T::of(2.0 / va.numel() as f64);
                    let ga = Tensor::from_fn(va.shape(), |i| (va.data()[i] - vb.data()[i]) * k);
                    let mut gb = ga.clone();
                    gb.scale(-T::one());
                    acc(&mut grads, a, ga);
                    acc(&mut grads, b, gb);
                }
                Op::MeanPool(x) => {
                    let vx = self.val(x)?;
                    let p = vx.positions();
                    let inv = T::of(1.0 / p as f64);
                    let gx = Tensor::from_fn(vx.shape(), |i| g.data()[i / p] * inv);
                    acc(&mut grads, x, gx);
                }
                Op::CrossEntropy { logits, label } => {
                    let v = self.val(logits)?;
                    let p = ops::softmax(v.data());
                    let s = g.data()[0].f64();
                    let gx = Tensor::from_fn(v.shape(), |i| T::of(s * (p[i] - if i == label { 1.0 } else { 0.0 })));
                    acc(&mut grads, logits, gx);
                }
                Op::Round(_) => {
                    return Err(DiffError::NonDifferentiable { node: id, op: "round" });
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn levels_from_channels(cin: usize, cout: usize, dims: usize) -> u32 {
    let mut levels = 0;
    let mut c = cin;
    while c < cout {
        c <<= dims;
        levels += 1;
    }
    levels
}
