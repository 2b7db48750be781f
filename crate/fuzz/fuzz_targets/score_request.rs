#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use tracescore_cli::schema::ScoreRequest;
use tracescore_cli::score::score_request;
use tracescore_cli::{ScoringContext, ScoringSettings};

static CTX: OnceLock<ScoringContext> = OnceLock::new();

fuzz_target!(|data: &[u8]| {
    let ctx = CTX.get_or_init(|| ScoringSettings::default().build().unwrap());
    let Ok(req) = serde_json::from_slice::<ScoreRequest>(data) else { return };
    if let Ok(resp) = score_request(ctx, &req) {
        let b = resp.breakdown;
        assert!(b.components().iter().all(|c| (0.0..=1.0).contains(c)));
        assert!((0.0..=10.0).contains(&b.total));
    }
});
