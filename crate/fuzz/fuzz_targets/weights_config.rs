#![no_main]

use libfuzzer_sys::fuzz_target;
use tracescore_core::rewards::{MatchConfig, RewardWeights};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(w) = RewardWeights::from_toml_str(s) {
        assert!(w.validate().is_ok());
    }
    if let Ok(m) = MatchConfig::from_toml_str(s) {
        assert!(m.validate().is_ok());
    }
});
