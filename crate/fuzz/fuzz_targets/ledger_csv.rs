#![no_main]

use congest_tri::RoundLedger;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(l) = RoundLedger::from_csv(text) {
        let _ = l.total();
        let _ = RoundLedger::from_csv(&l.to_csv()).expect("writer output parses");
    }
});
