#![no_main]

use congest_tri::config::parse_key_values;
use congest_tri::experiment::ExperimentConfig;
use congest_tri::Constants;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pairs) = parse_key_values(text) {
        let mut c = Constants::default();
        for (_, k, v) in &pairs {
            let _ = c.set(k, v);
        }
        let _ = c.validate();
    }
    let mut cfg = ExperimentConfig::default();
    let _ = cfg.apply_text(text);
});
