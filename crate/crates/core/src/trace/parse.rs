use once_cell::sync::Lazy;
use regex::Regex;
use serde_json::Value;

use super::citation::extract_citations;
use super::{select_hypothesis, EvidenceItem, FormatReport, Hypothesis, ParsedTrace, SectionCitations, ThinkBlocks};
use crate::labels::LabelSet;

pub const DEFAULT_K_MAX: usize = 2;
pub const MAX_EVIDENCE_PER_HYPOTHESIS: usize = 5;

static TAG: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)<\s*(/?)\s*(hypotheses|hyp|think|answer|ans)\s*>").unwrap());
static HEADER: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"(?i)\*{0,2}[ \t]*\[\s*(common|differences|decision)\s*\][ \t]*\*{0,2}[ \t]*:?").unwrap());
static EVIDENCE_STRING: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^\s*\[?([A-Za-z]+[0-9]+)\]?\s*(?:[:\-–—]\s*(.*))?$").unwrap());
static CODE_FENCE: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?s)^\s*```[A-Za-z]*\s*(.*?)\s*```\s*$").unwrap());

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    Hypotheses,
    Think,
    Answer,
}

impl Block {
    fn from_tag(name: &str) -> Block {
        match name.to_ascii_lowercase().as_str() {
            "hypotheses" | "hyp" => Block::Hypotheses,
            "think" => Block::Think,
            _ => Block::Answer,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Block::Hypotheses => "hypotheses",
            Block::Think => "think",
            Block::Answer => "answer",
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Span {
    open_start: usize,
    content_start: usize,
    content_end: usize,
    close_end: usize,
}

#[derive(Debug, Default)]
struct BlockScan {
    span: Option<Span>,
    opens: usize,
    closes: usize,
}

/// Parses raw model output. Never fails: malformed input yields empty
/// fields, cleared format flags and diagnostics.
pub fn parse_trace(raw: &str, k_max: usize) -> ParsedTrace {
    let k_max = k_max.max(1);
    let mut diagnostics = Vec::new();
    let scans = scan_blocks(raw, &mut diagnostics);

    let block_text =
        |b: Block| -> Option<&str> { scans[b as usize].span.map(|s| &raw[s.content_start..s.content_end]) };

    let tags_ordered = tags_in_order(&scans, &mut diagnostics);

    let (hypotheses, hypotheses_json_valid) = match block_text(Block::Hypotheses) {
        Some(text) => parse_hypotheses(text, k_max, &mut diagnostics),
        None => (Vec::new(), false),
    };

    let think_text = block_text(Block::Think);
    let think_nonempty = think_text.is_some_and(|t| !t.trim().is_empty());
    if think_text.is_some() && !think_nonempty {
        diagnostics.push("think block is empty".into());
    }
    let think = think_text.map(|t| parse_think(t, &mut diagnostics)).unwrap_or_default();

    let answer = match block_text(Block::Answer) {
        Some(text) => parse_answer(text, &mut diagnostics),
        None => LabelSet::default(),
    };
    let answer_valid = !answer.is_empty();
    if block_text(Block::Answer).is_some() && !answer_valid {
        diagnostics.push("answer block contains no labels".into());
    }

    let selected_hypothesis = select_hypothesis(&think);

    ParsedTrace {
        hypotheses,
        think,
        answer,
        format_report: FormatReport { tags_ordered, hypotheses_json_valid, think_nonempty, answer_valid, diagnostics },
        selected_hypothesis,
    }
}

fn scan_blocks(raw: &str, diagnostics: &mut Vec<String>) -> [BlockScan; 3] {
    let mut scans: [BlockScan; 3] = Default::default();
    let mut open_at: [Option<(usize, usize)>; 3] = [None; 3];
    for caps in TAG.captures_iter(raw) {
        let m = caps.get(0).unwrap();
        let block = Block::from_tag(&caps[2]);
        let scan = &mut scans[block as usize];
        let closing = !caps[1].is_empty();
        if closing {
            scan.closes += 1;
            if let (Some((start, content_start)), None) = (open_at[block as usize], scan.span) {
                scan.span = Some(Span { open_start: start, content_start, content_end: m.start(), close_end: m.end() });
            }
        } else {
            scan.opens += 1;
            if open_at[block as usize].is_none() {
                open_at[block as usize] = Some((m.start(), m.end()));
            }
        }
    }
    for block in [Block::Hypotheses, Block::Think, Block::Answer] {
        let scan = &scans[block as usize];
        if scan.opens == 0 {
            diagnostics.push(format!("missing <{}> block", block.name()));
        } else if scan.span.is_none() {
            diagnostics.push(format!("unclosed <{}> block", block.name()));
        }
        if scan.opens > 1 || scan.closes > 1 {
            diagnostics.push(format!("<{}> tag appears more than once", block.name()));
        }
    }
    scans
}

fn tags_in_order(scans: &[BlockScan; 3], diagnostics: &mut Vec<String>) -> bool {
    let all_single = scans.iter().all(|s| s.opens == 1 && s.closes == 1 && s.span.is_some());
    if !all_single {
        return false;
    }
    let spans: Vec<Span> = scans.iter().map(|s| s.span.unwrap()).collect();
    let ordered = spans[0].close_end <= spans[1].open_start && spans[1].close_end <= spans[2].open_start;
    if !ordered {
        diagnostics.push("blocks are not in hypotheses -> think -> answer order".into());
    }
    ordered
}

pub(crate) fn strip_fence(text: &str) -> &str {
    match CODE_FENCE.captures(text) {
        Some(caps) => caps.get(1).unwrap().as_str(),
        None => text.trim(),
    }
}

fn parse_hypotheses(text: &str, k_max: usize, diagnostics: &mut Vec<String>) -> (Vec<Hypothesis>, bool) {
    let value: Value = match serde_json::from_str(strip_fence(text)) {
        Ok(v) => v,
        Err(e) => {
            diagnostics.push(format!("hypotheses block is not valid JSON: {e}"));
            return (Vec::new(), false);
        }
    };
    let items = match value {
        Value::Array(items) => items,
        Value::Object(mut obj) => match obj.remove("hypotheses") {
            Some(Value::Array(items)) => items,
            _ => {
                diagnostics.push("hypotheses JSON object has no \"hypotheses\" array".into());
                return (Vec::new(), false);
            }
        },
        _ => {
            diagnostics.push("hypotheses JSON is neither an array nor an object".into());
            return (Vec::new(), false);
        }
    };

    let mut valid = !items.is_empty();
    if items.is_empty() {
        diagnostics.push("hypotheses list is empty".into());
    }
    let mut out: Vec<Hypothesis> = Vec::new();
    for (idx, item) in items.iter().enumerate() {
        match parse_hypothesis(item, idx, diagnostics) {
            Some(h) => {
                if out.iter().any(|o| o.id.eq_ignore_ascii_case(&h.id)) {
                    diagnostics.push(format!("duplicate hypothesis id {} dropped", h.id));
                    continue;
                }
                out.push(h);
            }
            None => valid = false,
        }
    }
    if out.len() > k_max {
        diagnostics.push(format!("{} hypotheses exceed k_max={k_max}; extra hypotheses dropped", out.len()));
        out.truncate(k_max);
    }
    (out, valid)
}

fn string_field<'a>(obj: &'a serde_json::Map<String, Value>, keys: &[&str]) -> Option<&'a str> {
    keys.iter().find_map(|k| obj.get(*k).and_then(Value::as_str))
}

fn parse_hypothesis(item: &Value, idx: usize, diagnostics: &mut Vec<String>) -> Option<Hypothesis> {
    let Some(obj) = item.as_object() else {
        diagnostics.push(format!("hypothesis #{} is not a JSON object", idx + 1));
        return None;
    };
    let id = match string_field(obj, &["id", "hypothesis_id"]).map(str::trim) {
        Some(id) if !id.is_empty() => canonical_hypothesis_id(id),
        _ => format!("H{}", idx + 1),
    };
    let assumption = string_field(obj, &["assumption", "context", "situation"]).map(str::trim).unwrap_or_default();
    if assumption.is_empty() {
        diagnostics.push(format!("hypothesis {id} has no assumption"));
        return None;
    }

    let raw_evidence: &[Value] = ["evidence", "evidence_ids_top5", "evidence_ids"]
        .iter()
        .find_map(|k| obj.get(*k).and_then(Value::as_array))
        .map(Vec::as_slice)
        .unwrap_or(&[]);

    let mut evidence: Vec<EvidenceItem> = Vec::new();
    for (j, ev) in raw_evidence.iter().enumerate() {
        let Some(item) = parse_evidence(ev, j, &id, diagnostics) else {
            continue;
        };
        if evidence.iter().any(|e| e.id == item.id) {
            diagnostics.push(format!("hypothesis {id}: duplicate evidence id {} dropped", item.id));
            continue;
        }
        evidence.push(item);
    }
    if evidence.len() > MAX_EVIDENCE_PER_HYPOTHESIS {
        diagnostics.push(format!(
            "hypothesis {id}: {} evidence items truncated to {MAX_EVIDENCE_PER_HYPOTHESIS}",
            evidence.len()
        ));
        evidence.truncate(MAX_EVIDENCE_PER_HYPOTHESIS);
    }
    Some(Hypothesis { id, assumption: assumption.to_string(), evidence })
}

fn canonical_hypothesis_id(id: &str) -> String {
    if id.len() > 1 && id.starts_with(['h', 'H']) && id[1..].bytes().all(|b| b.is_ascii_digit()) {
        id.to_ascii_uppercase()
    } else {
        id.to_string()
    }
}

fn parse_evidence(ev: &Value, idx: usize, hyp_id: &str, diagnostics: &mut Vec<String>) -> Option<EvidenceItem> {
    match ev {
        Value::Object(obj) => {
            let id = string_field(obj, &["id", "evidence_id"]).map(str::trim).unwrap_or_default();
            let description =
                string_field(obj, &["description", "desc", "text", "cue"]).map(str::trim).unwrap_or_default();
            if id.is_empty() {
                diagnostics.push(format!("hypothesis {hyp_id}: evidence #{} has no id", idx + 1));
                return None;
            }
            Some(EvidenceItem::new(id, description))
        }
        Value::String(s) => {
            if let Some(caps) = EVIDENCE_STRING.captures(s) {
                let description = caps.get(2).map(|m| m.as_str().trim()).unwrap_or_default();
                Some(EvidenceItem::new(&caps[1], description))
            } else if s.trim().is_empty() {
                diagnostics.push(format!("hypothesis {hyp_id}: evidence #{} is empty", idx + 1));
                None
            } else {
                Some(EvidenceItem::new(format!("e{}", idx + 1), s.trim()))
            }
        }
        _ => {
            diagnostics.push(format!("hypothesis {hyp_id}: evidence #{} has unsupported type", idx + 1));
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Common,
    Differences,
    Decision,
}

pub(crate) fn parse_think(text: &str, diagnostics: &mut Vec<String>) -> ThinkBlocks {
    let headers: Vec<(Section, usize, usize)> = HEADER
        .captures_iter(text)
        .map(|caps| {
            let m = caps.get(0).unwrap();
            let section = match caps[1].to_ascii_lowercase().as_str() {
                "common" => Section::Common,
                "differences" => Section::Differences,
                _ => Section::Decision,
            };
            (section, m.start(), m.end())
        })
        .collect();

    let mut bodies: [Option<String>; 3] = Default::default();
    let mut other_text = String::new();
    let preamble_end = headers.first().map_or(text.len(), |h| h.1);
    other_text.push_str(&text[..preamble_end]);

    for (i, &(section, _, body_start)) in headers.iter().enumerate() {
        let body_end = headers.get(i + 1).map_or(text.len(), |h| h.1);
        let body = &text[body_start..body_end];
        let slot = &mut bodies[section as usize];
        match slot {
            Some(existing) => {
                diagnostics.push(format!("think header [{section:?}] repeated; bodies merged"));
                existing.push('\n');
                existing.push_str(body);
            }
            None => *slot = Some(body.to_string()),
        }
    }

    let mut present = |section: Section| -> (Option<String>, Vec<super::Citation>) {
        match bodies[section as usize].take() {
            Some(body) => {
                let trimmed = body.trim();
                let citations = extract_citations(trimmed);
                if trimmed.is_empty() {
                    diagnostics.push(format!("think section [{section:?}] is empty"));
                    (None, citations)
                } else {
                    (Some(trimmed.to_string()), citations)
                }
            }
            None => {
                diagnostics.push(format!("think section [{section:?}] is missing"));
                (None, Vec::new())
            }
        }
    };
    let (common, common_c) = present(Section::Common);
    let (differences, diff_c) = present(Section::Differences);
    let (decision, dec_c) = present(Section::Decision);

    ThinkBlocks {
        common,
        differences,
        decision,
        citations: SectionCitations {
            common: common_c,
            differences: diff_c,
            decision: dec_c,
            other: extract_citations(&other_text),
        },
    }
}

fn parse_answer(text: &str, diagnostics: &mut Vec<String>) -> LabelSet {
    let body = strip_fence(text);
    match serde_json::from_str::<Value>(body) {
        Ok(Value::Array(items)) => {
            let labels: Vec<&str> = items.iter().filter_map(Value::as_str).collect();
            if labels.len() != items.len() {
                diagnostics.push("answer array contains non-string entries".into());
            }
            LabelSet::new(labels)
        }
        Ok(Value::String(s)) => LabelSet::new(split_labels(&s)),
        _ => {
            if !body.is_empty() {
                diagnostics.push("answer is not a JSON array; fell back to comma splitting".into());
            }
            LabelSet::new(split_labels(body))
        }
    }
}

fn split_labels(s: &str) -> Vec<&str> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split([',', ';', '\n'])
        .map(|t| t.trim().trim_matches(|c: char| c == '"' || c == '\'').trim())
        .filter(|t| !t.is_empty())
        .collect()
}
