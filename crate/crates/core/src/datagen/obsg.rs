use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DatagenError, TextProvider};
use crate::trace::{strip_fence, EvidenceItem};

/// Observation graph: objective cue descriptions with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsG {
    pub evidence: Vec<EvidenceItem>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub source_meta: BTreeMap<String, String>,
}

impl ObsG {
    pub fn get(&self, id: &str) -> Option<&EvidenceItem> {
        self.evidence.iter().find(|e| e.id.eq_ignore_ascii_case(id))
    }

    /// Checks that the graph is non-empty, ids are unique and every
    /// description is non-empty.
    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.evidence.is_empty() {
            return Err(DatagenError::Schema("observation graph has no evidence".into()));
        }
        for (i, e) in self.evidence.iter().enumerate() {
            if e.id.trim().is_empty() {
                return Err(DatagenError::Schema(format!("evidence #{} has an empty id", i + 1)));
            }
            if e.description.trim().is_empty() {
                return Err(DatagenError::Schema(format!("evidence {} has an empty description", e.id)));
            }
            if self.evidence[..i].iter().any(|o| o.id.eq_ignore_ascii_case(&e.id)) {
                return Err(DatagenError::Schema(format!("duplicate evidence id {}", e.id)));
            }
        }
        Ok(())
    }
}

/// Parses JSON from model output, tolerating code fences and surrounding
/// prose. Returns the serde error of the direct attempt on failure.
pub(crate) fn extract_json(text: &str) -> Result<Value, serde_json::Error> {
    let body = strip_fence(text);
    let direct = serde_json::from_str::<Value>(body);
    if direct.is_ok() {
        return direct;
    }
    let start = body.find(['{', '[']);
    let end = body.rfind(['}', ']']);
    if let (Some(s), Some(e)) = (start, end) {
        if s < e {
            if let Ok(v) = serde_json::from_str::<Value>(&body[s..=e]) {
                return Ok(v);
            }
        }
    }
    direct
}

fn meta_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Validates a parsed JSON value as an observation graph. Accepts either
/// `{"evidence": [...], "source_meta": {...}}` or a bare evidence array.
pub fn obsg_from_value(value: &Value) -> Result<ObsG, DatagenError> {
    let (items, meta) = match value {
        Value::Array(items) => (items, None),
        Value::Object(obj) => match obj.get("evidence") {
            Some(Value::Array(items)) => (items, obj.get("source_meta")),
            _ => return Err(DatagenError::Schema("missing \"evidence\" array".into())),
        },
        _ => return Err(DatagenError::Schema("expected a JSON object or array".into())),
    };
    let mut evidence = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let obj =
            item.as_object().ok_or_else(|| DatagenError::Schema(format!("evidence #{} is not an object", i + 1)))?;
        let field = |keys: &[&str]| keys.iter().find_map(|k| obj.get(*k).and_then(Value::as_str)).map(str::trim);
        let id = field(&["id", "evidence_id"]).unwrap_or_default();
        let description = field(&["description", "desc", "text", "cue"]).unwrap_or_default();
        evidence.push(EvidenceItem::new(id, description));
    }
    let source_meta = match meta {
        None | Some(Value::Null) => BTreeMap::new(),
        Some(Value::Object(m)) => m.iter().map(|(k, v)| (k.clone(), meta_value(v))).collect(),
        Some(_) => return Err(DatagenError::Schema("\"source_meta\" must be an object".into())),
    };
    let obsg = ObsG { evidence, source_meta };
    obsg.validate()?;
    Ok(obsg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObsGOutcome {
    pub obsg: ObsG,
    /// Extra provider calls made because earlier replies were not JSON.
    pub retries: u32,
}

/// Asks `provider` for an observation graph. Replies that are not JSON are
/// retried up to `max_retries` times; a JSON reply with the wrong shape
/// fails immediately.
pub fn generate_obsg(prompt: &str, provider: &dyn TextProvider, max_retries: u32) -> Result<ObsGOutcome, DatagenError> {
    let mut retries = 0;
    loop {
        let reply = provider.complete(prompt)?;
        match extract_json(&reply) {
            Ok(value) => return obsg_from_value(&value).map(|obsg| ObsGOutcome { obsg, retries }),
            Err(e) if retries < max_retries => {
                retries += 1;
                log::debug!("observation reply is not JSON ({e}); retry {retries}/{max_retries}");
            }
            Err(e) => return Err(DatagenError::RetriesExhausted { attempts: retries + 1, last_error: e.to_string() }),
        }
    }
}
