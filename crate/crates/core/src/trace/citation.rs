use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

static BRACKETED: Lazy<Regex> = Lazy::new(|| Regex::new(r"\[([^\[\]]*)\]").unwrap());
static HYPOTHESIS_REF: Lazy<Regex> = Lazy::new(|| Regex::new(r"^[Hh][0-9]+$").unwrap());

/// Longest bracket payload still treated as an evidence reference.
const MAX_EVIDENCE_CHARS: usize = 80;
const MAX_EVIDENCE_WORDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CitationKind {
    Evidence,
    Hypothesis,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Citation {
    pub raw: String,
    pub kind: CitationKind,
}

impl Citation {
    pub fn classify(raw: &str) -> CitationKind {
        if HYPOTHESIS_REF.is_match(raw) {
            CitationKind::Hypothesis
        } else if raw.chars().count() <= MAX_EVIDENCE_CHARS
            && raw.split_whitespace().count() <= MAX_EVIDENCE_WORDS
            && !raw.contains('\n')
        {
            CitationKind::Evidence
        } else {
            CitationKind::Other
        }
    }
}

/// One citation per innermost `[...]` span, in order of appearance. Empty
/// brackets are skipped; the payload is trimmed.
pub fn extract_citations(section_text: &str) -> Vec<Citation> {
    BRACKETED
        .captures_iter(section_text)
        .filter_map(|caps| {
            let raw = caps[1].trim();
            if raw.is_empty() {
                return None;
            }
            Some(Citation { raw: raw.to_string(), kind: Citation::classify(raw) })
        })
        .collect()
}
