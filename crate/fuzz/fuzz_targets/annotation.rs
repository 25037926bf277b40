#![no_main]

use congest_tri::io::{parse_annotation, write_annotation};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = parse_annotation(text) {
        assert_eq!(
            parse_annotation(&write_annotation(&a)).expect("writer output parses"),
            a
        );
    }
});
