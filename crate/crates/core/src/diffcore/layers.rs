//! Parameter containers. `bind` places parameters on a tape as leaves; the
//! plain `forward` methods run inference without recording anything.

use rand::Rng;

use super::{ops, DiffError, Scalar, Tape, Tensor, Var};

fn uniform<T: Scalar, R: Rng + ?Sized>(shape: &[usize], bound: f64, rng: &mut R) -> Tensor<T> {
    Tensor::from_fn(shape, |_| T::of(rng.random_range(-bound..=bound)))
}

/// Channel-mixing affine map; weights are `[C_in, C_out]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseParams<T> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundDense {
    pub weight: Var,
    pub bias: Var,
}

impl<T: Scalar> DenseParams<T> {
    pub fn zeros(c_in: usize, c_out: usize) -> Self {
        DenseParams {
            weight: Tensor::zeros(&[c_in, c_out]),
            bias: Tensor::zeros(&[c_out]),
        }
    }

    /// Uniform weights in `+-1/sqrt(C_in)`, zero bias.
    pub fn init<R: Rng + ?Sized>(c_in: usize, c_out: usize, rng: &mut R) -> Self {
        DenseParams {
            weight: uniform(&[c_in, c_out], 1.0 / (c_in as f64).sqrt(), rng),
            bias: Tensor::zeros(&[c_out]),
        }
    }

    pub fn c_in(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn c_out(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn num_params(&self) -> usize {
        self.weight.numel() + self.bias.numel()
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
        ops::dense_forward(x, &self.weight, &self.bias)
    }

    pub fn bind(&self, tape: &mut Tape<T>) -> BoundDense {
        BoundDense {
            weight: tape.leaf(self.weight.clone()),
            bias: tape.leaf(self.bias.clone()),
        }
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor<T>; 2] {
        [&mut self.weight, &mut self.bias]
    }
}

impl BoundDense {
    pub fn apply<T: Scalar>(&self, tape: &mut Tape<T>, x: Var) -> Result<Var, DiffError> {
        tape.dense(x, self.weight, self.bias)
    }

    pub fn vars(&self) -> [Var; 2] {
        [self.weight, self.bias]
    }
}

/// Same-padded convolution; kernels are `[C_out, C_in, k]` or
/// `[C_out, C_in, k, k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvParams<T> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundConv {
    pub weight: Var,
    pub bias: Var,
}

fn kernel_shape(c_in: usize, c_out: usize, k: usize, dims: usize) -> Vec<usize> {
    let mut s = vec![c_out, c_in];
    s.extend(std::iter::repeat_n(k, dims));
    s
}

impl<T: Scalar> ConvParams<T> {
    pub fn zeros(c_in: usize, c_out: usize, k: usize, dims: usize) -> Self {
        ConvParams {
            weight: Tensor::zeros(&kernel_shape(c_in, c_out, k, dims)),
            bias: Tensor::zeros(&[c_out]),
        }
    }

    /// Uniform weights in `+-1/sqrt(fan_in)`, zero bias.
    pub fn init<R: Rng + ?Sized>(c_in: usize, c_out: usize, k: usize, dims: usize, rng: &mut R) -> Self {
        let fan_in = c_in * k.pow(dims as u32);
        ConvParams {
            weight: uniform(&kernel_shape(c_in, c_out, k, dims), 1.0 / (fan_in as f64).sqrt(), rng),
            bias: Tensor::zeros(&[c_out]),
        }
    }

    pub fn num_params(&self) -> usize {
        self.weight.numel() + self.bias.numel()
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
        ops::conv_forward(x, &self.weight, &self.bias)
    }

    pub fn bind(&self, tape: &mut Tape<T>) -> BoundConv {
        BoundConv {
            weight: tape.leaf(self.weight.clone()),
            bias: tape.leaf(self.bias.clone()),
        }
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor<T>; 2] {
        [&mut self.weight, &mut self.bias]
    }
}

impl BoundConv {
    pub fn apply<T: Scalar>(&self, tape: &mut Tape<T>, x: Var) -> Result<Var, DiffError> {
        tape.conv(x, self.weight, self.bias)
    }

    pub fn vars(&self) -> [Var; 2] {
        [self.weight, self.bias]
    }
}

/// `x + conv2(silu(conv1(x)))` with 3-tap kernels.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualBlock<T> {
    pub conv1: ConvParams<T>,
    pub conv2: ConvParams<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundResidual {
    pub conv1: BoundConv,
    pub conv2: BoundConv,
}

impl<T: Scalar> ResidualBlock<T> {
    pub fn init<R: Rng + ?Sized>(channels: usize, dims: usize, rng: &mut R) -> Self {
        ResidualBlock {
            conv1: ConvParams::init(channels, channels, 3, dims, rng),
            conv2: ConvParams::init(channels, channels, 3, dims, rng),
        }
    }

    pub fn num_params(&self) -> usize {
        self.conv1.num_params() + self.conv2.num_params()
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>, DiffError> {
        let h = ops::silu_forward(&self.conv1.forward(x)?);
        let mut out = self.conv2.forward(&h)?;
        out.add_assign(x);
        Ok(out)
    }

    pub fn bind(&self, tape: &mut Tape<T>) -> BoundResidual {
        BoundResidual {
            conv1: self.conv1.bind(tape),
            conv2: self.conv2.bind(tape),
        }
    }

    pub fn tensors_mut(&mut self) -> [&mut Tensor<T>; 4] {
        let [a, b] = self.conv1.tensors_mut();
        let [c, d] = self.conv2.tensors_mut();
        [a, b, c, d]
    }
}

impl BoundResidual {
    pub fn apply<T: Scalar>(&self, tape: &mut Tape<T>, x: Var) -> Result<Var, DiffError> {
        let h = self.conv1.apply(tape, x)?;
        let h = tape.silu(h)?;
        let h = self.conv2.apply(tape, h)?;
        tape.add(x, h)
    }

    pub fn vars(&self) -> [Var; 4] {
        let [a, b] = self.conv1.vars();
        let [c, d] = self.conv2.vars();
        [a, b, c, d]
    }
}
