use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::obsg::extract_json;
use super::{DatagenError, ObsG};
use crate::labels::LabelSet;
use crate::rewards::GtAnnotation;
use crate::trace::{
    parse_think, parse_trace, render_think, render_trace_with_think, EvidenceItem, Hypothesis, Modality,
    MAX_EVIDENCE_PER_HYPOTHESIS,
};

pub const MAX_HYPOTHESES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ReasonerOutput {
    /// Evidence items carry ids only; descriptions are resolved against the
    /// observation graph at assembly time.
    pub hypotheses: Vec<Hypothesis>,
    pub think: String,
    pub diagnostics: Vec<String>,
}

fn error_at(e: &serde_json::Error) -> DatagenError {
    DatagenError::Unparseable { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Extracts hypotheses and the think text from a reasoner reply of the form
/// `{"hypotheses": [{"assumption", "evidence_ids_top5"}], "think": "..."}`.
pub fn parse_reasoner_output(text: &str) -> Result<ReasonerOutput, DatagenError> {
    let value = extract_json(text).map_err(|e| error_at(&e))?;
    let obj = value.as_object().ok_or_else(|| DatagenError::Schema("reasoner reply is not a JSON object".into()))?;
    let items = obj
        .get("hypotheses")
        .and_then(Value::as_array)
        .ok_or_else(|| DatagenError::Schema("missing \"hypotheses\" array".into()))?;
    if items.is_empty() || items.len() > MAX_HYPOTHESES {
        return Err(DatagenError::HypothesisCount(items.len()));
    }
    let think = obj
        .get("think")
        .and_then(Value::as_str)
        .ok_or_else(|| DatagenError::Schema("missing \"think\" string".into()))?
        .trim()
        .to_string();

    let mut hypotheses = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let h = item.as_object().ok_or_else(|| DatagenError::Schema(format!("hypotheses[{i}] is not an object")))?;
        let id = match h.get("id").and_then(Value::as_str).map(str::trim) {
            Some(id) if !id.is_empty() => id.to_ascii_uppercase(),
            _ => format!("H{}", i + 1),
        };
        let assumption = h.get("assumption").and_then(Value::as_str).map(str::trim).unwrap_or_default();
        if assumption.is_empty() {
            return Err(DatagenError::Schema(format!("hypotheses[{i}] has no assumption")));
        }
        let ids = ["evidence_ids_top5", "evidence_ids", "evidence"]
            .iter()
            .find_map(|k| h.get(*k).and_then(Value::as_array))
            .ok_or_else(|| DatagenError::Schema(format!("hypotheses[{i}] has no evidence_ids_top5 array")))?;
        let evidence = ids
            .iter()
            .enumerate()
            .map(|(j, v)| match v.as_str().map(str::trim) {
                Some(id) if !id.is_empty() => {
                    Ok(EvidenceItem { id: id.to_string(), modality: Modality::Unknown, description: String::new() })
                }
                _ => Err(DatagenError::Schema(format!("hypotheses[{i}].evidence_ids_top5[{j}] is not an id string"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        hypotheses.push(Hypothesis { id, assumption: assumption.to_string(), evidence });
    }

    let mut diagnostics = Vec::new();
    parse_think(&think, &mut diagnostics);
    diagnostics.retain(|d| d.contains("missing") || d.contains("empty"));
    Ok(ReasonerOutput { hypotheses, think, diagnostics })
}

/// Keeps the first `top_k` distinct evidence ids of every hypothesis, in
/// order. `top_k` of zero is treated as one.
pub fn enforce_evidence_cap(hypotheses: Vec<Hypothesis>, top_k: usize) -> Vec<Hypothesis> {
    let top_k = top_k.max(1);
    hypotheses
        .into_iter()
        .map(|mut h| {
            let mut kept: Vec<EvidenceItem> = Vec::with_capacity(top_k);
            for e in h.evidence {
                if kept.len() == top_k {
                    break;
                }
                if !kept.iter().any(|k| k.id == e.id) {
                    kept.push(e);
                }
            }
            h.evidence = kept;
            h
        })
        .collect()
}

/// Sets each evidence item's modality from its id prefix.
pub fn derive_modalities(hypotheses: Vec<Hypothesis>) -> Vec<Hypothesis> {
    hypotheses
        .into_iter()
        .map(|mut h| {
            for e in &mut h.evidence {
                e.modality = Modality::from_id(&e.id);
            }
            h
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSample {
    pub obsg: ObsG,
    pub hypotheses: Vec<Hypothesis>,
    pub think: String,
    pub answer: LabelSet,
    pub assembled: String,
}

/// Builds the canonical tagged sample. Evidence descriptions are filled from
/// the observation graph; ids it does not contain are dropped. The think
/// text is re-rendered under canonical headers and must contain all three
/// sections.
pub fn assemble_sample(
    obsg: &ObsG,
    hypotheses: &[Hypothesis],
    think: &str,
    gt: &GtAnnotation,
) -> Result<GenSample, DatagenError> {
    if hypotheses.is_empty() {
        return Err(DatagenError::EmptyHypotheses);
    }
    if gt.labels.is_empty() {
        return Err(DatagenError::EmptyGroundTruth);
    }
    let mut diagnostics = Vec::new();
    let blocks = parse_think(think, &mut diagnostics);
    let missing: Vec<String> =
        [("Common", &blocks.common), ("Differences", &blocks.differences), ("Decision", &blocks.decision)]
            .iter()
            .filter(|(_, b)| b.is_none())
            .map(|(n, _)| n.to_string())
            .collect();
    if !missing.is_empty() {
        return Err(DatagenError::IncompleteThink(missing));
    }

    let resolved: Vec<Hypothesis> = hypotheses
        .iter()
        .map(|h| {
            let evidence = h
                .evidence
                .iter()
                .filter_map(|e| {
                    let found = obsg.get(&e.id);
                    if found.is_none() {
                        log::debug!("hypothesis {}: evidence id {} not in observation graph", h.id, e.id);
                    }
                    found.cloned()
                })
                .take(MAX_EVIDENCE_PER_HYPOTHESIS)
                .collect();
            Hypothesis { id: h.id.clone(), assumption: h.assumption.clone(), evidence }
        })
        .collect();

    let think_text = render_think(&blocks);
    let answer = gt.labels.clone();
    let assembled = render_trace_with_think(&resolved, &think_text, &answer);
    let check = parse_trace(&assembled, resolved.len());
    let r = &check.format_report;
    if !(r.tags_ordered && r.hypotheses_json_valid && r.think_nonempty && r.answer_valid && check.think.all_present()) {
        return Err(DatagenError::AssemblyInvalid(r.diagnostics.clone()));
    }
    Ok(GenSample { obsg: obsg.clone(), hypotheses: resolved, think: think_text, answer, assembled })
}
