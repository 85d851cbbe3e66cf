use super::CodecError;
use crate::signal::Signal;

/// Rounded, companded latent: signed 8-bit values in `[-127, 127]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantizedLatent {
    channels: usize,
    extents: Vec<usize>,
    data: Vec<i8>,
}

impl QuantizedLatent {
    pub fn new(channels: usize, extents: &[usize], data: Vec<i8>) -> Result<Self, CodecError> {
        if extents.is_empty() || extents.len() > 2 {
            return Err(CodecError::Shape(format!("latent needs 1 or 2 axes, got {}", extents.len())));
        }
        let n = channels * extents.iter().product::<usize>();
        if n == 0 || n != data.len() {
            return Err(CodecError::Shape(format!(
                "{channels} channels x {extents:?} needs {n} values, got {}",
                data.len()
            )));
        }
        if data.contains(&i8::MIN) {
            return Err(CodecError::Shape("latent value -128 is outside [-127, 127]".into()));
        }
        Ok(QuantizedLatent {
            channels,
            extents: extents.to_vec(),
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn plane_len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn data(&self) -> &[i8] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[i8] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn to_signal(&self) -> Signal<f32> {
        Signal::new(self.channels, &self.extents, self.data.iter().map(|&v| v as f32).collect())
            .expect("validated at construction")
    }
}
