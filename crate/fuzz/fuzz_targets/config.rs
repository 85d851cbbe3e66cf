#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::codec::CodecConfig;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((cfg, _)) = CodecConfig::parse(text) {
            cfg.validate().expect("parsed configs are valid");
        }
    }
});
