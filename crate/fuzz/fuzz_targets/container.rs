#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::bitstream::{read_container, write_container};

fuzz_target!(|data: &[u8]| {
    if let Ok((q, meta)) = read_container(data) {
        let again = write_container(&q, &meta).expect("parsed container re-encodes");
        let (q2, meta2) = read_container(&again).expect("re-encoded container parses");
        assert_eq!((q, meta), (q2, meta2));
    }
});
