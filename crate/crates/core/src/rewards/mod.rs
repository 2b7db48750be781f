//! The six reward components and their weighted composition.

mod components;
mod config;

pub use components::{
    fuzzy_match, length_penalty, q_discretize, reward_accuracy, reward_cite, reward_evidence, reward_format,
    reward_semantic, reward_think, MatchPool,
};
pub use config::{MatchConfig, RewardWeights, ScoreConfig, SimilarityNormalizer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{EmbedError, Embedder};
use crate::ew::WheelLexicon;
use crate::labels::LabelSet;
use crate::trace::{parse_trace, ParsedTrace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("ground-truth label set is empty")]
    EmptyGroundTruth,
    #[error("lexicon defines {available} wheels, {required} required")]
    MissingWheels { required: usize, available: usize },
    #[error("embedding failed: {0}")]
    Embedding(#[from] EmbedError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl RewardError {
    /// Errors caused by configuration rather than by the scored sample.
    pub fn is_config(&self) -> bool {
        matches!(self, RewardError::MissingWheels { .. } | RewardError::Config(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GtAnnotation {
    pub labels: LabelSet,
    #[serde(default)]
    pub cues: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub r_acc: f64,
    pub r_fmt: f64,
    pub r_think: f64,
    pub r_cite: f64,
    pub r_evid: f64,
    pub r_sem: f64,
    pub length_penalty: f64,
    pub weights: RewardWeights,
    pub total: f64,
}

impl RewardBreakdown {
    pub fn components(&self) -> [f64; 6] {
        [self.r_acc, self.r_fmt, self.r_think, self.r_cite, self.r_evid, self.r_sem]
    }

    /// Composes a breakdown from component values; `total` is the weighted sum.
    pub fn compose(components: [f64; 6], length_penalty: f64, weights: RewardWeights) -> Self {
        let total = components.iter().zip(weights.as_array()).map(|(r, w)| r * w).sum();
        let [r_acc, r_fmt, r_think, r_cite, r_evid, r_sem] = components;
        RewardBreakdown { r_acc, r_fmt, r_think, r_cite, r_evid, r_sem, length_penalty, weights, total }
    }
}

/// Scores an already-parsed trace.
pub fn score_parsed(
    parsed: &ParsedTrace,
    gt: &GtAnnotation,
    cfg: &ScoreConfig,
    lexicon: &WheelLexicon,
    embedder: &dyn Embedder,
) -> Result<RewardBreakdown, RewardError> {
    if gt.labels.is_empty() {
        return Err(RewardError::EmptyGroundTruth);
    }
    let r_acc = reward_accuracy(&parsed.answer, &gt.labels, lexicon, cfg.required_wheels)?;
    let r_fmt = reward_format(&parsed.format_report);
    let r_think = reward_think(&parsed.think);
    let r_cite = reward_cite(parsed);
    let r_evid = reward_evidence(parsed, &cfg.matching);
    let pred_cues: Vec<String> = parsed.evidence_pool().into_iter().map(|e| e.description).collect();
    let r_sem = reward_semantic(&pred_cues, &gt.cues, embedder)?;
    let penalty = length_penalty(gt.labels.len(), parsed.answer.len());
    Ok(RewardBreakdown::compose([r_acc, r_fmt, r_think, r_cite, r_evid, r_sem], penalty, cfg.weights))
}

/// Parses `raw` and scores it against the annotation.
pub fn score_trace(
    raw: &str,
    gt: &GtAnnotation,
    cfg: &ScoreConfig,
    lexicon: &WheelLexicon,
    embedder: &dyn Embedder,
) -> Result<RewardBreakdown, RewardError> {
    score_parsed(&parse_trace(raw, cfg.k_max), gt, cfg, lexicon, embedder)
}
