#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::datasets::{decode_pnm, encode_pnm};

fuzz_target!(|data: &[u8]| {
    if let Ok(x) = decode_pnm(data) {
        let y = decode_pnm(&encode_pnm(&x).expect("decoded image re-encodes")).unwrap();
        assert_eq!(x, y);
    }
});
