use serde::{Deserialize, Serialize};
use tracescore_core::rewards::RewardBreakdown;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub id: String,
    pub trace: String,
    pub gt_labels: Vec<String>,
    #[serde(default)]
    pub gt_cues: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub id: String,
    pub breakdown: RewardBreakdown,
    pub parse_diagnostics: Vec<String>,
}

/// In-line failure for one batch item. `id` is null when the line could not
/// be read far enough to find one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub id: Option<String>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageRequest {
    pub group_id: String,
    pub id: String,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageResponse {
    pub group_id: String,
    pub id: String,
    pub advantage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageError {
    pub group_id: Option<String>,
    pub id: Option<String>,
    pub error: String,
}

/// Best-effort string field from a line that failed to deserialize.
pub(crate) fn string_field(line: &str, key: &str) -> Option<String> {
    serde_json::from_str::<serde_json::Value>(line).ok()?.get(key)?.as_str().map(str::to_string)
}

/// One rendered output item: the JSON text and whether it reports a failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub json: String,
    pub failed: bool,
}

impl Rendered {
    pub(crate) fn ok<T: Serialize>(v: &T) -> Self {
        Rendered { json: serde_json::to_string(v).expect("response serializes"), failed: false }
    }

    pub(crate) fn err<T: Serialize>(v: &T) -> Self {
        Rendered { json: serde_json::to_string(v).expect("error serializes"), failed: true }
    }
}

/// `[a,b,...]` from rendered items; the service body for a batch.
pub fn join_array(items: &[Rendered]) -> String {
    let mut out = String::with_capacity(items.iter().map(|i| i.json.len() + 1).sum::<usize>() + 2);
    out.push('[');
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&item.json);
    }
    out.push(']');
    out
}
