#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use walloc::codec::{CodecConfig, CodecModel};
use walloc::Kind;

fn model() -> &'static CodecModel {
    static M: OnceLock<CodecModel> = OnceLock::new();
    M.get_or_init(|| {
        let cfg = CodecConfig { kind: Kind::TwoD, c_x: 3, levels: 3, c_z: 12, c_hidden: 8, depth: 1, ..CodecConfig::image_16x() };
        CodecModel::new(cfg, 0).expect("valid config")
    })
}

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = model().decompress(data) {
        assert_eq!(x.channels(), 3);
    }
});
