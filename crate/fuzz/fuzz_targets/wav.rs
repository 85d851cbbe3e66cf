#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::datasets::{decode_wav, encode_wav};

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = decode_wav(data) {
        let y = decode_wav(&encode_wav(&x, 44100).expect("decoded audio re-encodes")).unwrap();
        assert_eq!(x, y);
    }
});
