#![no_main]

use libfuzzer_sys::fuzz_target;
use tracescore_core::ew::{group_labels, WheelLexicon};
use tracescore_core::LabelSet;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(lex) = WheelLexicon::from_toml_str(s) else { return };
    let labels = LabelSet::new(lex.l1().keys().chain(lex.l2().keys()).map(String::as_str));
    for w in 0..lex.k() {
        let once = group_labels(&labels, &lex, w);
        assert_eq!(group_labels(&once, &lex, w), once);
    }
});
