#![no_main]

use libfuzzer_sys::fuzz_target;
use tracescore_core::trace::{parse_trace, MAX_EVIDENCE_PER_HYPOTHESIS};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    for k in 1..=3 {
        let parsed = parse_trace(&text, k);
        assert!(parsed.hypotheses.len() <= k);
        assert!(parsed.hypotheses.iter().all(|h| h.evidence.len() <= MAX_EVIDENCE_PER_HYPOTHESIS));
        assert_eq!(parsed, parse_trace(&text, k));
    }
});
