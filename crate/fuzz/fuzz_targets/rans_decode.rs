#![no_main]

use libfuzzer_sys::fuzz_target;
use walloc::bitstream::{rans_decode, FreqTable};

// Layout: symbol count (u16), table source length (u8), table source bytes
// as i8 symbols, then the rANS payload.
fuzz_target!(|data: &[u8]| {
    if data.len() < 3 {
        return;
    }
    let n = u16::from_le_bytes([data[0], data[1]]) as usize;
    let k = (data[2] as usize).min(data.len() - 3);
    let source: Vec<i8> = data[3..3 + k].iter().map(|&b| (b as i8).max(-127)).collect();
    let Ok(table) = FreqTable::build(&source) else { return };
    let _ = rans_decode(&data[3 + k..], &table, n);
});
