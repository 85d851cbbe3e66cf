//! Writes seed inputs for the fuzz targets into `fuzz/corpus/<target>/`.

use std::path::Path;

use walloc::bitstream::{rans_encode, FreqTable};
use walloc::codec::{CodecConfig, CodecModel};
use walloc::datasets::{encode_pnm, encode_tensor, encode_wav, synth_audio, synth_image, SynthImageParams};
use walloc::Kind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let put = |target: &str, name: &str, bytes: &[u8]| -> std::io::Result<()> {
        let dir = root.join(target);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(name), bytes)
    };

    let golden = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden.wllc"))?;
    put("container", "golden.wllc", &golden)?;

    let cfg = CodecConfig { kind: Kind::TwoD, c_x: 3, levels: 3, c_z: 12, c_hidden: 8, depth: 1, ..CodecConfig::image_16x() };
    let model = CodecModel::new(cfg, 0)?;
    let img = synth_image(&SynthImageParams { height: 21, width: 13, ..Default::default() }, 1);
    put("decompress", "small.wllc", &model.compress(&img)?)?;
    put("container", "small.wllc", &model.compress(&img)?)?;
    put("checkpoint", "tiny.wlcm", &model.to_bytes()?)?;

    put("pnm", "rgb.ppm", &encode_pnm(&img)?)?;
    let grey = walloc::Signal::new(1, &[5, 7], img.channel(0)[..35].to_vec())?;
    put("pnm", "grey.pgm", &encode_pnm(&grey)?)?;

    let audio = synth_audio(2, 64, 8000, 2);
    put("wav", "stereo.wav", &encode_wav(&audio, 8000)?)?;
    let mono = walloc::Signal::new(1, &[32], audio.channel(0)[..32].to_vec())?;
    put("wav", "mono.wav", &encode_wav(&mono, 44100)?)?;

    put("tensor", "image.f32", &encode_tensor(&grey))?;
    put("tensor", "audio.f32", &encode_tensor(&mono))?;

    let source: Vec<i8> = (0..40).map(|i| ((i * 7) % 9) as i8 - 4).collect();
    let table = FreqTable::build(&source)?;
    let payload = rans_encode(&source, &table)?;
    let mut seed = (source.len() as u16).to_le_bytes().to_vec();
    seed.push(source.len() as u8);
    seed.extend(source.iter().map(|&s| s as u8));
    seed.extend_from_slice(&payload);
    put("rans_decode", "forty.bin", &seed)?;

    for (name, _) in CodecConfig::shipped() {
        let text = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../configs/{name}.conf")))?;
        put("config", &format!("{name}.conf"), &text)?;
    }
    Ok(())
}
