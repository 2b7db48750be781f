//! Data model for Propose-Verify-Decide traces and the parser that turns
//! raw tagged model output into it.
//!
//! A well-formed trace looks like
//!
//! ```text
//! <hypotheses>
//! [{"id":"H1","assumption":"...","evidence":[{"id":"v1","description":"..."}]}]
//! </hypotheses>
//! <think>
//! **[Common]** ... [v1] ... [H1]
//! **[Differences]** ...
//! **[Decision]** ... [H2] ...
//! </think>
//! <answer>["anxious","worried"]</answer>
//! ```
//!
//! `<hyp>` and `<ans>` are accepted as aliases on input.

mod citation;
mod parse;
mod render;

pub use citation::{extract_citations, Citation, CitationKind};
pub(crate) use parse::{parse_think, strip_fence};
pub use parse::{parse_trace, DEFAULT_K_MAX, MAX_EVIDENCE_PER_HYPOTHESIS};
pub use render::{render_think, render_trace, render_trace_with_think};

use serde::{Deserialize, Serialize};

use crate::labels::LabelSet;
use crate::text::normalize_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Video,
    Audio,
    Text,
    Unknown,
}

impl Modality {
    /// Derives the modality from an evidence id prefix: `v` video, `a` audio,
    /// `t` text. Anything else is unknown.
    pub fn from_id(id: &str) -> Modality {
        let mut chars = id.trim().chars();
        let Some(first) = chars.next() else {
            return Modality::Unknown;
        };
        // Only a single-letter prefix followed by a digit counts ("v1", "a12").
        if !chars.next().is_some_and(|c| c.is_ascii_digit()) {
            return Modality::Unknown;
        }
        match first.to_ascii_lowercase() {
            'v' => Modality::Video,
            'a' => Modality::Audio,
            't' => Modality::Text,
            _ => Modality::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub id: String,
    pub modality: Modality,
    #[serde(default)]
    pub description: String,
}

impl EvidenceItem {
    pub fn new(id: impl Into<String>, description: impl Into<String>) -> Self {
        let id = id.into();
        EvidenceItem { modality: Modality::from_id(&id), id, description: description.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub id: String,
    pub assumption: String,
    pub evidence: Vec<EvidenceItem>,
}

/// Bracketed citations found in each think section. `other` holds citations
/// from text inside `<think>` that is not under any of the three headers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCitations {
    pub common: Vec<Citation>,
    pub differences: Vec<Citation>,
    pub decision: Vec<Citation>,
    pub other: Vec<Citation>,
}

impl SectionCitations {
    pub fn all(&self) -> impl Iterator<Item = &Citation> {
        self.common.iter().chain(&self.differences).chain(&self.decision).chain(&self.other)
    }
}

/// The three adjudication sections of `<think>`. A section is `Some` only
/// when its header was found and its body is non-empty after trimming.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinkBlocks {
    pub common: Option<String>,
    pub differences: Option<String>,
    pub decision: Option<String>,
    pub citations: SectionCitations,
}

impl ThinkBlocks {
    pub fn all_present(&self) -> bool {
        self.common.is_some() && self.differences.is_some() && self.decision.is_some()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatReport {
    pub tags_ordered: bool,
    pub hypotheses_json_valid: bool,
    pub think_nonempty: bool,
    pub answer_valid: bool,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParsedTrace {
    pub hypotheses: Vec<Hypothesis>,
    pub think: ThinkBlocks,
    pub answer: LabelSet,
    pub format_report: FormatReport,
    pub selected_hypothesis: Option<String>,
}

impl ParsedTrace {
    pub fn evidence_pool(&self) -> Vec<EvidenceItem> {
        evidence_pool(&self.hypotheses)
    }

    /// Whether `id` names one of the parsed hypotheses (case-insensitive).
    pub fn is_candidate(&self, id: &str) -> bool {
        self.hypotheses.iter().any(|h| h.id.eq_ignore_ascii_case(id))
    }
}

/// Union of evidence items over all hypotheses, deduplicated on the
/// normalized `(id, description)` pair, in first-occurrence order.
pub fn evidence_pool(hypotheses: &[Hypothesis]) -> Vec<EvidenceItem> {
    let mut seen = std::collections::HashSet::new();
    let mut pool = Vec::new();
    for item in hypotheses.iter().flat_map(|h| &h.evidence) {
        let key = (normalize_text(&item.id), normalize_text(&item.description));
        if seen.insert(key) {
            pool.push(item.clone());
        }
    }
    pool
}

/// The hypothesis adopted by the decision section: its last hypothesis
/// citation, upper-cased (`"h2"` becomes `"H2"`).
pub fn select_hypothesis(think: &ThinkBlocks) -> Option<String> {
    think.decision.as_ref()?;
    think
        .citations
        .decision
        .iter()
        .rev()
        .find(|c| c.kind == CitationKind::Hypothesis)
        .map(|c| c.raw.to_ascii_uppercase())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyp(id: &str, ev: &[(&str, &str)]) -> Hypothesis {
        Hypothesis {
            id: id.into(),
            assumption: "context".into(),
            evidence: ev.iter().map(|(i, d)| EvidenceItem::new(*i, *d)).collect(),
        }
    }

    #[test]
    fn modality_from_prefix() {
        assert_eq!(Modality::from_id("v3"), Modality::Video);
        assert_eq!(Modality::from_id("a1"), Modality::Audio);
        assert_eq!(Modality::from_id("T2"), Modality::Text);
        assert_eq!(Modality::from_id("x9"), Modality::Unknown);
        assert_eq!(Modality::from_id("voice"), Modality::Unknown);
        assert_eq!(Modality::from_id(""), Modality::Unknown);
    }

    #[test]
    fn pool_union_dedups() {
        let hs = vec![hyp("H1", &[("v1", "frown"), ("a1", "sigh")]), hyp("H2", &[("v1", "frown"), ("t1", "I'm fine")])];
        let ids: Vec<_> = evidence_pool(&hs).into_iter().map(|e| e.id).collect();
        assert_eq!(ids, ["v1", "a1", "t1"]);
        assert!(evidence_pool(&[]).is_empty());
    }

    #[test]
    fn pool_counts_disjoint_items() {
        let a: Vec<(String, String)> = (1..=5).map(|i| (format!("v{i}"), format!("cue {i}"))).collect();
        let b: Vec<(String, String)> = (1..=5).map(|i| (format!("a{i}"), format!("sound {i}"))).collect();
        let to = |v: &Vec<(String, String)>| v.iter().map(|(i, d)| EvidenceItem::new(i.clone(), d.clone())).collect();
        let hs = vec![
            Hypothesis { id: "H1".into(), assumption: "x".into(), evidence: to(&a) },
            Hypothesis { id: "H2".into(), assumption: "y".into(), evidence: to(&b) },
        ];
        assert_eq!(evidence_pool(&hs).len(), 10);
    }

    #[test]
    fn pool_keeps_same_id_with_different_description() {
        let hs = vec![hyp("H1", &[("v1", "frown")]), hyp("H2", &[("v1", "smile")])];
        assert_eq!(evidence_pool(&hs).len(), 2);
    }

    fn think_with_decision(text: Option<&str>) -> ThinkBlocks {
        ThinkBlocks {
            decision: text.map(str::to_string),
            citations: SectionCitations {
                decision: text.map(extract_citations).unwrap_or_default(),
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn selects_last_hypothesis_citation() {
        let t = think_with_decision(Some("[H1] is weaker; [h2] holds given [v1]"));
        assert_eq!(select_hypothesis(&t).as_deref(), Some("H2"));
        assert_eq!(select_hypothesis(&think_with_decision(None)), None);
        let t = think_with_decision(Some("only [v1] and [a2]"));
        assert_eq!(select_hypothesis(&t), None);
    }
}
