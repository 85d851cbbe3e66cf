//! Whole-signal compression: pad, encode, entropy-code into a container, and
//! the reverse.

use super::{CodecError, CodecModel};
use crate::bitstream::{read_container, write_container, ContainerMeta};
use crate::datasets::{crop, pad_to_divisible};
use crate::signal::Signal;

impl CodecModel {
    fn container_meta(&self, original: Vec<usize>, padded: Vec<usize>) -> ContainerMeta {
        ContainerMeta {
            kind: self.config.kind,
            levels: self.config.levels,
            c_x: self.config.c_x,
            original_extents: original,
            padded_extents: padded,
            scales: self.scales(),
        }
    }

    /// Pads `x` to a multiple of `2^J`, encodes it and writes a container.
    pub fn compress(&self, x: &Signal<f32>) -> Result<Vec<u8>, CodecError> {
        let (padded, original) = pad_to_divisible(x, self.config.levels);
        let q = self.encode_latent(&padded)?;
        let meta = self.container_meta(original, padded.extents().to_vec());
        Ok(write_container(&q, &meta)?)
    }

    /// The unrounded companded latent of the padded signal, as used for
    /// learning in the compressed domain.
    pub fn latent(&self, x: &Signal<f32>) -> Result<Signal<f32>, CodecError> {
        let (padded, _) = pad_to_divisible(x, self.config.levels);
        self.compand(&self.analyze(&padded)?)
    }

    /// Reads a container written by a model of the same configuration and
    /// returns the reconstruction cropped to the original extents.
    pub fn decompress(&self, bytes: &[u8]) -> Result<Signal<f32>, CodecError> {
        let (q, meta) = read_container(bytes)?;
        self.check_meta(&meta)?;
        let y = self.decode_latent(&q)?;
        Ok(crop(&y, &meta.original_extents))
    }

    /// Rejects containers written by a model with different settings.
    pub fn check_meta(&self, meta: &ContainerMeta) -> Result<(), CodecError> {
        let cfg = &self.config;
        if meta.kind != cfg.kind || meta.levels != cfg.levels || meta.c_x != cfg.c_x || meta.scales.len() != cfg.c_z {
            return Err(CodecError::Mismatch(format!(
                "container is {:?} with c_x={} J={} c_z={}, model is {:?} with c_x={} J={} c_z={}",
                meta.kind,
                meta.c_x,
                meta.levels,
                meta.scales.len(),
                cfg.kind,
                cfg.c_x,
                cfg.levels,
                cfg.c_z
            )));
        }
        if meta.scales != self.scales() {
            return Err(CodecError::Mismatch("compander scales differ from the model's".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::CodecConfig;

    fn small() -> CodecConfig {
        CodecConfig {
            c_hidden: 8,
            depth: 1,
            ..CodecConfig::image_16x()
        }
    }

    #[test]
    fn odd_sizes_round_trip_to_the_original_shape() {
        let mut model = CodecModel::new(small(), 1).unwrap();
        model.params.exit.weight.data_mut().iter_mut().for_each(|v| *v = 0.01);
        let x = Signal::new(3, &[21, 13], (0..3 * 21 * 13).map(|i| ((i % 17) as f32 / 8.5) - 1.0).collect()).unwrap();
        let bytes = model.compress(&x).unwrap();
        let y = model.decompress(&bytes).unwrap();
        assert!(x.same_shape(&y));
        assert_eq!(model.latent(&x).unwrap().extents(), &[3, 2]);
    }

    #[test]
    fn other_models_are_rejected() {
        let a = CodecModel::new(small(), 1).unwrap();
        let x = Signal::new(3, &[8, 8], vec![0.0; 192]).unwrap();
        let bytes = a.compress(&x).unwrap();
        let mut b = CodecModel::new(small(), 2).unwrap();
        b.params.log_scales.data_mut()[0] += 0.5;
        assert!(matches!(b.decompress(&bytes), Err(CodecError::Mismatch(_))));
        let c = CodecModel::new(CodecConfig::image_4x(), 1).unwrap();
        assert!(matches!(c.decompress(&bytes), Err(CodecError::Mismatch(_))));
    }
}
