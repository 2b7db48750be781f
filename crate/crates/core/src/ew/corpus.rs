use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::{grouped_set, scores_for_sets, Grouping, SetScores};
use super::WheelLexicon;
use crate::labels::LabelSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("no samples to evaluate")]
    Empty,
    #[error("sample {0}: ground-truth label set is empty")]
    EmptyGroundTruth(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSample {
    pub pred: LabelSet,
    pub gt: LabelSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WheelScores {
    pub wheel: String,
    #[serde(flatten)]
    pub scores: SetScores,
}

/// Corpus-level metrics. Precision and recall are sample means; each F1 is
/// the harmonic mean of the corresponding corpus precision and recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub samples: usize,
    pub wheels: Vec<WheelScores>,
    pub ew: f64,
    pub s1: f64,
    pub s2: f64,
    pub fine: SetScores,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groups: BTreeMap<String, MetricReport>,
}

impl MetricReport {
    /// Every value multiplied by `factor` (100 for percentage reporting).
    pub fn scaled(&self, factor: f64) -> MetricReport {
        let s =
            |x: SetScores| SetScores { precision: x.precision * factor, recall: x.recall * factor, f1: x.f1 * factor };
        MetricReport {
            samples: self.samples,
            wheels: self.wheels.iter().map(|w| WheelScores { wheel: w.wheel.clone(), scores: s(w.scores) }).collect(),
            ew: self.ew * factor,
            s1: self.s1 * factor,
            s2: self.s2 * factor,
            fine: s(self.fine),
            groups: self.groups.iter().map(|(k, v)| (k.clone(), v.scaled(factor))).collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct Sums {
    n: usize,
    wheel_p: Vec<f64>,
    wheel_r: Vec<f64>,
    fine_p: f64,
    fine_r: f64,
}

impl Sums {
    fn new(k: usize) -> Self {
        Sums { n: 0, wheel_p: vec![0.0; k], wheel_r: vec![0.0; k], fine_p: 0.0, fine_r: 0.0 }
    }

    fn add(&mut self, per_wheel: &[SetScores], fine: SetScores) {
        self.n += 1;
        for (i, s) in per_wheel.iter().enumerate() {
            self.wheel_p[i] += s.precision;
            self.wheel_r[i] += s.recall;
        }
        self.fine_p += fine.precision;
        self.fine_r += fine.recall;
    }

    fn report(&self, lexicon: &WheelLexicon) -> MetricReport {
        let n = self.n as f64;
        let wheels: Vec<WheelScores> = lexicon
            .wheels()
            .iter()
            .enumerate()
            .map(|(i, w)| WheelScores {
                wheel: w.name.clone(),
                scores: SetScores::from_pr(self.wheel_p[i] / n, self.wheel_r[i] / n),
            })
            .collect();
        let ew = wheels.iter().map(|w| w.scores.f1).sum::<f64>() / wheels.len() as f64;
        let fine = SetScores::from_pr(self.fine_p / n, self.fine_r / n);
        MetricReport { samples: self.n, wheels, ew, s1: ew, s2: fine.f1, fine, groups: BTreeMap::new() }
    }
}

/// Streaming corpus evaluation with optional per-group sub-reports.
#[derive(Debug, Clone)]
pub struct CorpusEvaluator<'a> {
    lexicon: &'a WheelLexicon,
    total: Sums,
    groups: BTreeMap<String, Sums>,
}

impl<'a> CorpusEvaluator<'a> {
    pub fn new(lexicon: &'a WheelLexicon) -> Self {
        CorpusEvaluator { lexicon, total: Sums::new(lexicon.k()), groups: BTreeMap::new() }
    }

    pub fn add(&mut self, sample: &EvalSample) -> Result<(), EvalError> {
        if sample.gt.is_empty() {
            return Err(EvalError::EmptyGroundTruth(self.total.n));
        }
        let per_wheel: Vec<SetScores> = (0..self.lexicon.k())
            .map(|w| {
                let g = Grouping::Wheel(w);
                scores_for_sets(&grouped_set(&sample.pred, self.lexicon, g), &grouped_set(&sample.gt, self.lexicon, g))
            })
            .collect();
        let fine = scores_for_sets(
            &grouped_set(&sample.pred, self.lexicon, Grouping::Synonym),
            &grouped_set(&sample.gt, self.lexicon, Grouping::Synonym),
        );
        self.total.add(&per_wheel, fine);
        if let Some(tag) = &sample.group {
            self.groups.entry(tag.clone()).or_insert_with(|| Sums::new(self.lexicon.k())).add(&per_wheel, fine);
        }
        Ok(())
    }

    pub fn finish(self) -> Result<MetricReport, EvalError> {
        if self.total.n == 0 {
            return Err(EvalError::Empty);
        }
        let mut report = self.total.report(self.lexicon);
        report.groups = self.groups.iter().map(|(k, v)| (k.clone(), v.report(self.lexicon))).collect();
        Ok(report)
    }
}

pub fn evaluate_corpus<'s, I>(samples: I, lexicon: &WheelLexicon) -> Result<MetricReport, EvalError>
where
    I: IntoIterator<Item = &'s EvalSample>,
{
    let mut eval = CorpusEvaluator::new(lexicon);
    for s in samples {
        eval.add(s)?;
    }
    eval.finish()
}
