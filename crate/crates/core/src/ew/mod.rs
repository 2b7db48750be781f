//! Emotion-Wheel set-level evaluation: three-level label grouping,
//! per-wheel precision/recall/F1, the EW aggregate, coarse/fine S1/S2 scores
//! and group-stratified corpus reports.

mod corpus;
mod lexicon;
mod metrics;

pub use corpus::{evaluate_corpus, CorpusEvaluator, EvalError, EvalSample, MetricReport, WheelScores};
pub use lexicon::{load_lexicon, LexiconError, Wheel, WheelLexicon};
pub use metrics::{ew_score, group_labels, s1_s2, set_metrics, set_metrics_with, Grouping, SetScores};
