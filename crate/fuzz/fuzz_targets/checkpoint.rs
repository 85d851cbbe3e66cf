#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::codec::CodecModel;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = CodecModel::from_bytes(data) {
        let _ = m.to_bytes();
    }
});
