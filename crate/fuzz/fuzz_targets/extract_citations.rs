#![no_main]

use libfuzzer_sys::fuzz_target;
use tracescore_core::trace::extract_citations;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        for c in extract_citations(s) {
            assert!(!c.raw.is_empty());
        }
    }
});
