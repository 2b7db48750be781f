use serde_json::json;

use super::{Hypothesis, ThinkBlocks};
use crate::labels::LabelSet;

/// Renders the three think sections under their canonical headers.
/// Absent sections are rendered with an empty body.
pub fn render_think(think: &ThinkBlocks) -> String {
    let body = |s: &Option<String>| s.as_deref().unwrap_or("").to_string();
    format!(
        "**[Common]** {}\n**[Differences]** {}\n**[Decision]** {}",
        body(&think.common),
        body(&think.differences),
        body(&think.decision)
    )
}

/// Canonical tagged text for a trace.
pub fn render_trace(hypotheses: &[Hypothesis], think: &ThinkBlocks, answer: &LabelSet) -> String {
    render_trace_with_think(hypotheses, &render_think(think), answer)
}

/// Canonical tagged text with a pre-rendered think body.
pub fn render_trace_with_think(hypotheses: &[Hypothesis], think_text: &str, answer: &LabelSet) -> String {
    let hyps: Vec<_> = hypotheses
        .iter()
        .map(|h| {
            json!({
                "id": h.id,
                "assumption": h.assumption,
                "evidence": h.evidence.iter().map(|e| json!({
                    "id": e.id,
                    "description": e.description,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let hyps = serde_json::to_string(&hyps).expect("hypotheses serialize");
    let answer = serde_json::to_string(answer.as_slice()).expect("labels serialize");
    format!(
        "<hypotheses>\n{hyps}\n</hypotheses>\n<think>\n{}\n</think>\n<answer>\n{answer}\n</answer>",
        think_text.trim()
    )
}
