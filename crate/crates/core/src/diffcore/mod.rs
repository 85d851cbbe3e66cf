//! Minimal reverse-mode differentiation for the codec and the small
//! classifiers: dense and convolution layers, SiLU, residual blocks, the
//! companding ops, the wavelet transforms, MSE and cross-entropy.
//!
//! Feature maps are channels-first, one sample per tape: `[C, L]` in 1D and
//! `[C, H, W]` in 2D. Batches are formed by summing per-sample gradients.

mod gradcheck;
pub mod layers;
pub mod ops;
mod optim;
mod tape;
mod tensor;

pub use gradcheck::{grad_check, grad_check_probes, GradCheckReport, REL_FLOOR};
pub use layers::{ConvParams, DenseParams, ResidualBlock};
pub use optim::Adam;
pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;

use std::fmt::Debug;
use std::iter::Sum;

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffError {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },
    #[error("node {0} is not on this tape; run the forward pass first")]
    NoForward(usize),
    #[error("backward needs a scalar loss, got shape {0:?}")]
    NotScalar(Vec<usize>),
    #[error("gradient reached non-differentiable node {node} ({op})")]
    NonDifferentiable { node: usize, op: &'static str },
    #[error("non-finite value produced by {op} (node {node})")]
    NonFinite { node: usize, op: &'static str },
    #[error("non-finite gradient for parameter {0}")]
    NonFiniteGradient(usize),
}

pub(crate) fn shape_err(op: &'static str, detail: impl Into<String>) -> DiffError {
    DiffError::Shape {
        op,
        detail: detail.into(),
    }
}

/// Floating-point element type with a matrix-multiply kernel.
pub trait Scalar: Float + Default + Debug + Send + Sync + Sum + 'static {
    /// Row-major `c = op(a) * op(b) + beta * c` where `op(a)` is `m x k` and
    /// `op(b)` is `k x n`. A transposed operand is stored in its
    /// untransposed layout.
    #[allow(clippy::too_many_arguments)]
    fn gemm(m: usize, k: usize, n: usize, a: &[Self], trans_a: bool, b: &[Self], trans_b: bool, beta: Self, c: &mut [Self]);

    fn of(v: f64) -> Self {
        Self::from(v).expect("f64 converts to any float")
    }

    fn f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }
}

fn strides(rows: usize, cols: usize, trans: bool) -> (isize, isize) {
    // Logical (rows x cols) operand; a transposed one is stored cols x rows.
    if trans {
        (1, rows as isize)
    } else {
        (cols as isize, 1)
    }
}

macro_rules! impl_scalar {
    ($t:ty, $kernel:path) => {
        impl Scalar for $t {
            fn gemm(m: usize, k: usize, n: usize, a: &[Self], trans_a: bool, b: &[Self], trans_b: bool, beta: Self, c: &mut [Self]) {
                assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n);
                if m == 0 || n == 0 {
                    return;
                }
                let (rsa, csa) = strides(m, k, trans_a);
                let (rsb, csb) = strides(k, n, trans_b);
                // SAFETY: the asserts above bound every index the kernel
                // touches for these strides.
                unsafe {
                    $kernel(m, k, n, 1.0, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta, c.as_mut_ptr(), n as isize, 1);
                }
            }
        }
    };
}

impl_scalar!(f32, matrixmultiply::sgemm);
impl_scalar!(f64, matrixmultiply::dgemm);
