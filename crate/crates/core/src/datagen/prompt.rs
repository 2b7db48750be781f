use std::collections::BTreeMap;

use once_cell::sync::Lazy;
use regex::Regex;

use super::{DatagenError, ObsG};
use crate::rewards::GtAnnotation;

/// Rendered in place of a modality or hint that has no text.
pub const ABSENT_MARKER: &str = "(absent)";

static SLOT: Lazy<Regex> = Lazy::new(|| Regex::new(r"\{\{\s*([A-Za-z_][A-Za-z0-9_]*)\s*\}\}").unwrap());

pub const DEFAULT_OBSG_TEMPLATE: &str = "\
Turn the descriptions below into an observation graph of objective, time-ordered cues.
Reply with JSON only: {\"evidence\":[{\"id\":\"v1\",\"description\":\"...\"}],\"source_meta\":{}}.
Prefix ids with v for video cues, a for audio cues and t for transcript cues.
Do not infer emotions.

[VIDEO]
{{video}}

[AUDIO]
{{audio}}

[TRANSCRIPT]
{{transcript}}
";

pub const DEFAULT_REASONER_TEMPLATE: &str = "\
Work only from the observation graph below.
Reply with JSON only: {\"hypotheses\":[{\"id\":\"H1\",\"assumption\":\"...\",\"evidence_ids_top5\":[\"v1\"]}],\"think\":\"...\"}.
Give between one and three hypotheses, each with at most five distinct evidence ids.
The think text must contain the sections **[Common]**, **[Differences]** and **[Decision]**,
cite evidence as [v1] and hypotheses as [H1], and name the chosen hypothesis in [Decision].

[OBSERVATION GRAPH]
{{obsg}}

[EVAL-ONLY: reference labels, never quote]
{{gt_labels}}

[EVAL-ONLY: reference cues, never quote]
{{gt_cues}}
";

/// Fills every `{{name}}` slot of `template` from `values`. Empty values
/// render as [`ABSENT_MARKER`].
pub fn fill_template(template: &str, values: &BTreeMap<&str, String>) -> Result<String, DatagenError> {
    if let Some(caps) = SLOT.captures_iter(template).find(|c| !values.contains_key(&c[1])) {
        return Err(DatagenError::UnknownSlot(caps[1].to_string()));
    }
    let filled = SLOT.replace_all(template, |caps: &regex::Captures| {
        let v = values[&caps[1]].trim();
        if v.is_empty() {
            ABSENT_MARKER.to_string()
        } else {
            v.to_string()
        }
    });
    Ok(filled.into_owned())
}

fn slots(template: &str) -> Vec<String> {
    SLOT.captures_iter(template).map(|c| c[1].to_string()).collect()
}

/// Per-modality source text for one input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModalText {
    pub video: String,
    pub audio: String,
    pub transcript: String,
}

/// Builds the observation-generation prompt. Slots: `video`, `audio`,
/// `transcript`. A modality with text must have a slot in the template.
pub fn construct_obsg_prompt(text: &ModalText, template: &str) -> Result<String, DatagenError> {
    let values = BTreeMap::from([
        ("video", text.video.clone()),
        ("audio", text.audio.clone()),
        ("transcript", text.transcript.clone()),
    ]);
    if values.values().all(|v| v.trim().is_empty()) {
        return Err(DatagenError::NoModalityText);
    }
    let present = slots(template);
    for (name, v) in &values {
        if !v.trim().is_empty() && !present.iter().any(|s| s == name) {
            return Err(DatagenError::MissingSlot(name.to_string()));
        }
    }
    fill_template(template, &values)
}

/// Builds the reasoning prompt from the observation graph and the reference
/// annotation. Slots: `obsg`, `gt_labels`, `gt_cues`; the template must
/// contain `obsg` and `gt_labels`.
pub fn construct_reasoner_prompt(obsg: &ObsG, gt: &GtAnnotation, template: &str) -> Result<String, DatagenError> {
    if gt.labels.is_empty() {
        return Err(DatagenError::EmptyGroundTruth);
    }
    let present = slots(template);
    for required in ["obsg", "gt_labels"] {
        if !present.iter().any(|s| s == required) {
            return Err(DatagenError::MissingSlot(required.to_string()));
        }
    }
    let obsg_json = serde_json::to_string_pretty(obsg).expect("obsg serializes");
    let cues = gt
        .cues
        .iter()
        .map(|c| c.trim())
        .filter(|c| !c.is_empty())
        .map(|c| format!("- {c}"))
        .collect::<Vec<_>>()
        .join("\n");
    let values =
        BTreeMap::from([("obsg", obsg_json), ("gt_labels", gt.labels.as_slice().join(", ")), ("gt_cues", cues)]);
    fill_template(template, &values)
}
