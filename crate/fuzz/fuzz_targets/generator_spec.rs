#![no_main]

use congest_tri::generators::GeneratorSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<GeneratorSpec>() {
        let again: GeneratorSpec = spec.to_string().parse().expect("display output parses");
        assert_eq!(again, spec);
    }
});
