#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::datasets::{decode_tensor, encode_tensor};

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = decode_tensor(data) {
        assert_eq!(encode_tensor(&x), data);
    }
});
