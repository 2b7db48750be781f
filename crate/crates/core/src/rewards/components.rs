use super::{MatchConfig, RewardError};
use crate::embed::{cosine, EmbedError, Embedder};
use crate::ew::{set_metrics, WheelLexicon};
use crate::labels::LabelSet;
use crate::text::{levenshtein_similarity, normalize_text};
use crate::trace::{CitationKind, EvidenceItem, FormatReport, ParsedTrace, ThinkBlocks};

/// Evidence pool with ids and descriptions pre-normalized for matching.
#[derive(Debug, Clone, Default)]
pub struct MatchPool {
    ids: Vec<String>,
    descriptions: Vec<String>,
}

impl MatchPool {
    pub fn new(pool: &[EvidenceItem]) -> Self {
        MatchPool {
            ids: pool.iter().map(|e| normalize_text(&e.id)).filter(|s| !s.is_empty()).collect(),
            descriptions: pool.iter().map(|e| normalize_text(&e.description)).filter(|s| !s.is_empty()).collect(),
        }
    }

    /// Id equality, then substring containment in either direction, then the
    /// best Levenshtein similarity against the threshold. All comparisons
    /// are on normalized text; an empty citation never matches.
    pub fn matches(&self, citation: &str, cfg: &MatchConfig) -> bool {
        let c = normalize_text(citation);
        if c.is_empty() {
            return false;
        }
        if self.ids.contains(&c) {
            return true;
        }
        if self.descriptions.iter().any(|d| d.contains(&c) || c.contains(d.as_str())) {
            return true;
        }
        self.descriptions.iter().any(|d| levenshtein_similarity(&c, d) >= cfg.levenshtein_threshold)
    }
}

pub fn fuzzy_match(citation: &str, pool: &[EvidenceItem], cfg: &MatchConfig) -> bool {
    MatchPool::new(pool).matches(citation, cfg)
}

/// Quarter credit per format flag.
pub fn reward_format(report: &FormatReport) -> f64 {
    let flags = [report.tags_ordered, report.hypotheses_json_valid, report.think_nonempty, report.answer_valid];
    flags.iter().filter(|f| **f).count() as f64 / 4.0
}

/// 1 when all three think sections are present.
pub fn reward_think(think: &ThinkBlocks) -> f64 {
    if think.all_present() {
        1.0
    } else {
        0.0
    }
}

/// One third each for citing a candidate hypothesis in the common section,
/// citing one in the differences section, and adopting a candidate in the
/// decision.
pub fn reward_cite(trace: &ParsedTrace) -> f64 {
    let cites_candidate = |cs: &[crate::trace::Citation]| {
        cs.iter().any(|c| c.kind == CitationKind::Hypothesis && trace.is_candidate(&c.raw))
    };
    let c = &trace.think.citations;
    let hits = [
        trace.think.common.is_some() && cites_candidate(&c.common),
        trace.think.differences.is_some() && cites_candidate(&c.differences),
        trace.selected_hypothesis.as_deref().is_some_and(|h| trace.is_candidate(h)),
    ];
    hits.iter().filter(|h| **h).count() as f64 / 3.0
}

/// Fraction of evidence citations in `<think>` that resolve into the
/// trace's own evidence pool; 0 without citations.
pub fn reward_evidence(trace: &ParsedTrace, cfg: &MatchConfig) -> f64 {
    let citations: Vec<&str> =
        trace.think.citations.all().filter(|c| c.kind == CitationKind::Evidence).map(|c| c.raw.as_str()).collect();
    if citations.is_empty() {
        return 0.0;
    }
    let pool = MatchPool::new(&trace.evidence_pool());
    let hits = citations.iter().filter(|c| pool.matches(c, cfg)).count();
    hits as f64 / citations.len() as f64
}

/// Maps a cosine similarity onto {0, 0.5, 1}.
pub fn q_discretize(s: f64) -> f64 {
    if s >= 0.7 {
        1.0
    } else if s >= 0.5 {
        0.5
    } else {
        0.0
    }
}

/// Mean discretized best-match similarity of predicted cues against
/// ground-truth cues. Texts that normalize to nothing are ignored; the
/// reward is 0 when either side is empty.
pub fn reward_semantic(pred_cues: &[String], gt_cues: &[String], embedder: &dyn Embedder) -> Result<f64, EmbedError> {
    let keep = |v: &[String]| -> Vec<String> { v.iter().filter(|s| !normalize_text(s).is_empty()).cloned().collect() };
    let pred = keep(pred_cues);
    let gt = keep(gt_cues);
    if pred.is_empty() || gt.is_empty() {
        return Ok(0.0);
    }
    let mut texts = pred.clone();
    texts.extend(gt.iter().cloned());
    let vectors = embedder.embed(&texts)?;
    let (pv, gv) = vectors.split_at(pred.len());
    let mut total = 0.0;
    for p in pv {
        let mut best = f64::NEG_INFINITY;
        for g in gv {
            best = best.max(cosine(p, g)?);
        }
        total += q_discretize(best);
    }
    Ok(total / pred.len() as f64)
}

/// `min(1, gt_count / pred_count)`, 0 for an empty prediction.
pub fn length_penalty(gt_count: usize, pred_count: usize) -> f64 {
    if pred_count == 0 {
        return 0.0;
    }
    (gt_count as f64 / pred_count as f64).min(1.0)
}

/// Length-penalized mean F1 over all wheels of the lexicon, which must
/// define at least `required_wheels` of them.
pub fn reward_accuracy(
    pred: &LabelSet,
    gt: &LabelSet,
    lexicon: &WheelLexicon,
    required_wheels: usize,
) -> Result<f64, RewardError> {
    if gt.is_empty() {
        return Err(RewardError::EmptyGroundTruth);
    }
    if lexicon.k() < required_wheels {
        return Err(RewardError::MissingWheels { required: required_wheels, available: lexicon.k() });
    }
    let k = lexicon.k();
    let penalty = length_penalty(gt.len(), pred.len());
    if penalty == 0.0 {
        return Ok(0.0);
    }
    let mean_f1 = (0..k).map(|w| set_metrics(pred, gt, lexicon, w).f1).sum::<f64>() / k as f64;
    Ok(penalty * mean_f1)
}
