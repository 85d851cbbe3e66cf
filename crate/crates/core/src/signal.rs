//! Channels-first sample tensors shared by every stage of the pipeline.

use num_traits::{Float, NumCast};
use thiserror::Error;

/// Dimensionality of a signal: audio-like sequences or images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    OneD,
    TwoD,
}

impl Kind {
    pub fn dims(self) -> usize {
        match self {
            Kind::OneD => 1,
            Kind::TwoD => 2,
        }
    }

    pub fn from_dims(dims: usize) -> Option<Kind> {
        match dims {
            1 => Some(Kind::OneD),
            2 => Some(Kind::TwoD),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("expected 1 or 2 spatial extents, got {0}")]
    Rank(usize),
    #[error("data length {got} does not match {channels} channels x {extents:?}")]
    Length {
        got: usize,
        channels: usize,
        extents: Vec<usize>,
    },
    #[error("signal has no samples")]
    Empty,
}

/// A multi-channel 1D or 2D signal stored channel-major: `data[c][y][x]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal<T = f32> {
    channels: usize,
    extents: Vec<usize>,
    data: Vec<T>,
}

impl<T: Float> Signal<T> {
    pub fn new(channels: usize, extents: &[usize], data: Vec<T>) -> Result<Self, ShapeError> {
        if extents.is_empty() || extents.len() > 2 {
            return Err(ShapeError::Rank(extents.len()));
        }
        let expected = channels * extents.iter().product::<usize>();
        if expected == 0 {
            return Err(ShapeError::Empty);
        }
        if data.len() != expected {
            return Err(ShapeError::Length {
                got: data.len(),
                channels,
                extents: extents.to_vec(),
            });
        }
        Ok(Signal {
            channels,
            extents: extents.to_vec(),
            data,
        })
    }

    pub fn zeros(channels: usize, extents: &[usize]) -> Result<Self, ShapeError> {
        let n = channels * extents.iter().product::<usize>();
        Self::new(channels, extents, vec![T::zero(); n])
    }

    pub fn kind(&self) -> Kind {
        Kind::from_dims(self.extents.len()).expect("validated at construction")
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    /// Samples per channel.
    pub fn plane_len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[T] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [T] {
        let n = self.plane_len();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn energy(&self) -> f64 {
        self.data
            .iter()
            .map(|v| {
                let v = v.to_f64().unwrap_or(f64::NAN);
                v * v
            })
            .sum()
    }

    pub fn cast<U: Float>(&self) -> Signal<U> {
        Signal {
            channels: self.channels,
            extents: self.extents.clone(),
            data: self
                .data
                .iter()
                .map(|&v| <U as NumCast>::from(v).expect("float cast"))
                .collect(),
        }
    }

    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Signal<T> {
        Signal {
            channels: self.channels,
            extents: self.extents.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_shape(&self, other: &Signal<T>) -> bool {
        self.channels == other.channels && self.extents == other.extents
    }
}
