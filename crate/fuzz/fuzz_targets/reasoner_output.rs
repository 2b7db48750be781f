#![no_main]

use libfuzzer_sys::fuzz_target;
use tracescore_core::datagen::{parse_reasoner_output, MAX_HYPOTHESES};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(out) = parse_reasoner_output(s) {
            assert!((1..=MAX_HYPOTHESES).contains(&out.hypotheses.len()));
        }
    }
});
