use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::WheelLexicon;
use crate::labels::LabelSet;
use crate::text::normalize_text;

/// Which composite grouping to apply to a label set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// L1 then L2 (fine-grained, S2).
    Synonym,
    /// L1, L2, then the given wheel's clustering (coarse-grained).
    Wheel(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SetScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SetScores {
    /// Harmonic mean of `precision` and `recall`, zero when both are zero.
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        SetScores { precision, recall, f1 }
    }
}

pub(crate) fn grouped_set(labels: &LabelSet, lexicon: &WheelLexicon, grouping: Grouping) -> BTreeSet<String> {
    labels
        .iter()
        .map(normalize_text)
        .filter(|w| !w.is_empty())
        .map(|w| match grouping {
            Grouping::Synonym => lexicon.synonym_form(&w).to_string(),
            Grouping::Wheel(k) => lexicon.wheel_form(&w, k).to_string(),
        })
        .collect()
}

/// Applies the wheel's composite grouping to every label and deduplicates.
/// Unknown words pass through each level unchanged.
///
/// # Panics
/// If `wheel_index >= lexicon.k()`.
pub fn group_labels(labels: &LabelSet, lexicon: &WheelLexicon, wheel_index: usize) -> LabelSet {
    assert!(wheel_index < lexicon.k(), "wheel index {wheel_index} out of range");
    // preserve first-occurrence order rather than the set's sort order
    let mut out = Vec::new();
    for w in labels.iter().map(normalize_text).filter(|w| !w.is_empty()) {
        out.push(lexicon.wheel_form(&w, wheel_index).to_string());
    }
    LabelSet::new(out)
}

pub(crate) fn scores_for_sets(pred: &BTreeSet<String>, gt: &BTreeSet<String>) -> SetScores {
    if pred.is_empty() {
        return SetScores::default();
    }
    let hits = pred.intersection(gt).count() as f64;
    let precision = hits / pred.len() as f64;
    let recall = if gt.is_empty() { 0.0 } else { hits / gt.len() as f64 };
    SetScores::from_pr(precision, recall)
}

pub fn set_metrics_with(pred: &LabelSet, gt: &LabelSet, lexicon: &WheelLexicon, grouping: Grouping) -> SetScores {
    scores_for_sets(&grouped_set(pred, lexicon, grouping), &grouped_set(gt, lexicon, grouping))
}

/// Sample-level precision, recall and F1 under one wheel. An empty grouped
/// prediction scores zero on all three.
pub fn set_metrics(pred: &LabelSet, gt: &LabelSet, lexicon: &WheelLexicon, wheel_index: usize) -> SetScores {
    set_metrics_with(pred, gt, lexicon, Grouping::Wheel(wheel_index))
}

/// Mean per-wheel F1.
pub fn ew_score(pred: &LabelSet, gt: &LabelSet, lexicon: &WheelLexicon) -> f64 {
    let k = lexicon.k();
    (0..k).map(|w| set_metrics(pred, gt, lexicon, w).f1).sum::<f64>() / k as f64
}

/// `(s1, s2)`: coarse score (EW over all wheels) and fine score (set F1 with
/// L1/L2 grouping only).
pub fn s1_s2(pred: &LabelSet, gt: &LabelSet, lexicon: &WheelLexicon) -> (f64, f64) {
    let s1 = ew_score(pred, gt, lexicon);
    let s2 = set_metrics_with(pred, gt, lexicon, Grouping::Synonym).f1;
    (s1, s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn ls(v: &[&str]) -> LabelSet {
        LabelSet::new(v.iter().copied())
    }

    #[test]
    fn morphological_then_wheel() {
        let lex =
            WheelLexicon::new(map(&[("happier", "happy")]), map(&[]), vec![("w".into(), map(&[("happy", "joy")]))])
                .unwrap();
        assert_eq!(group_labels(&ls(&["happier"]), &lex, 0), ls(&["joy"]));
        assert_eq!(group_labels(&ls(&[]), &lex, 0), ls(&[]));
    }

    #[test]
    fn synonyms_collapse() {
        let lex = WheelLexicon::new(
            map(&[]),
            map(&[("joyful", "happy"), ("cheerful", "happy")]),
            vec![("w".into(), map(&[]))],
        )
        .unwrap();
        assert_eq!(group_labels(&ls(&["joyful", "cheerful"]), &lex, 0), ls(&["happy"]));
    }

    fn worked_example_lexicon(k: usize) -> WheelLexicon {
        WheelLexicon::new(map(&[]), map(&[("joyful", "happy")]), (0..k).map(|i| (format!("w{i}"), map(&[]))).collect())
            .unwrap()
    }

    #[test]
    fn worked_example_half() {
        // G(gt) = {happy, proud}, G(pred) = {happy, sad}; |∩| = 1
        let lex = worked_example_lexicon(5);
        let s = set_metrics(&ls(&["joyful", "sad"]), &ls(&["happy", "proud"]), &lex, 0);
        assert_eq!(s, SetScores { precision: 0.5, recall: 0.5, f1: 0.5 });
        assert_eq!(ew_score(&ls(&["joyful", "sad"]), &ls(&["happy", "proud"]), &lex), 0.5);
    }

    #[test]
    fn identical_and_empty() {
        let lex = WheelLexicon::sample();
        let gt = ls(&["sad", "lonely"]);
        assert_eq!(set_metrics(&gt, &gt, &lex, 2), SetScores { precision: 1.0, recall: 1.0, f1: 1.0 });
        assert_eq!(ew_score(&gt, &gt, &lex), 1.0);
        assert_eq!(set_metrics(&ls(&[]), &gt, &lex, 0), SetScores::default());
        assert_eq!(ew_score(&ls(&[]), &gt, &lex), 0.0);
        assert_eq!(s1_s2(&gt, &gt, &lex), (1.0, 1.0));
    }

    #[test]
    fn coarse_equal_fine_different() {
        let lex =
            WheelLexicon::new(map(&[]), map(&[]), vec![("w".into(), map(&[("content", "joy"), ("happy", "joy")]))])
                .unwrap();
        let (s1, s2) = s1_s2(&ls(&["content"]), &ls(&["happy"]), &lex);
        assert_eq!(s1, 1.0);
        assert!(s2 < 1.0);
        assert_eq!(s1_s2(&ls(&["bored"]), &ls(&["happy"]), &lex), (0.0, 0.0));
    }

    #[test]
    fn case_and_punctuation_insensitive() {
        let lex = WheelLexicon::sample();
        let a = set_metrics(&ls(&["Happy!", "SAD"]), &ls(&["happy", "sad"]), &lex, 0);
        assert_eq!(a.f1, 1.0);
    }
}
