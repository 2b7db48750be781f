use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde_json::Value;
use tracescore_core::ew::{CorpusEvaluator, EvalSample, MetricReport, WheelLexicon};
use tracescore_core::labels::LabelSet;
use tracescore_core::trace::{parse_trace, DEFAULT_K_MAX};

use crate::schema::{ItemError, Rendered};
use crate::{CliError, RunSummary};

fn labels(v: &Value, key: &str) -> Result<LabelSet, String> {
    match v {
        Value::Array(items) => items
            .iter()
            .map(|x| x.as_str().ok_or_else(|| format!("{key} must contain only strings")))
            .collect::<Result<Vec<_>, _>>()
            .map(LabelSet::new),
        _ => Err(format!("{key} must be an array of strings")),
    }
}

fn label_pair(line: &str) -> Result<(LabelSet, LabelSet, serde_json::Map<String, Value>), String> {
    let v: Value = serde_json::from_str(line).map_err(|e| format!("invalid line: {e}"))?;
    let Value::Object(obj) = v else {
        return Err("line is not a JSON object".into());
    };
    let pred = match (obj.get("pred"), obj.get("trace")) {
        (Some(p), _) => labels(p, "pred")?,
        (None, Some(Value::String(t))) => parse_trace(t, DEFAULT_K_MAX).answer,
        _ => return Err("missing pred (or trace)".into()),
    };
    let gt = labels(obj.get("gt").or_else(|| obj.get("gt_labels")).ok_or("missing gt")?, "gt")?;
    Ok((pred, gt, obj))
}

/// Reads one evaluation line: `{"pred": [...], "gt": [...]}`. `trace` may
/// stand in for `pred` (its answer block is used) and `gt_labels` for `gt`.
/// With `group_by`, that field's value tags the sample.
pub fn eval_sample(line: &str, group_by: Option<&str>) -> Result<EvalSample, String> {
    let (pred, gt, obj) = label_pair(line)?;
    if gt.is_empty() {
        return Err("ground-truth label set is empty".into());
    }
    let group = match group_by {
        None => None,
        Some(key) => match obj.get(key) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => Some(other.to_string()),
        },
    };
    Ok(EvalSample { pred, gt, group })
}

fn line_error(line: &str, error: String) -> Rendered {
    Rendered::err(&ItemError { id: crate::schema::string_field(line, "id"), error })
}

/// Corpus report (x100) over all readable lines plus per-line failures.
pub fn evaluate_lines<'a, I>(
    lines: I,
    lexicon: &WheelLexicon,
    group_by: Option<&str>,
) -> (Option<MetricReport>, Vec<Rendered>)
where
    I: IntoIterator<Item = &'a str>,
{
    let mut eval = CorpusEvaluator::new(lexicon);
    let mut failures = Vec::new();
    for line in lines {
        match eval_sample(line, group_by) {
            Ok(s) => eval.add(&s).expect("ground truth checked"),
            Err(e) => failures.push(line_error(line, e)),
        }
    }
    (eval.finish().ok().map(|r| r.scaled(100.0)), failures)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Json,
    Table,
}

pub fn render_table(report: &MetricReport) -> String {
    let mut s = String::new();
    let mut section = |name: &str, r: &MetricReport| {
        let _ = writeln!(s, "{name} (n={})", r.samples);
        let _ = writeln!(s, "  {:<12} {:>8} {:>8} {:>8}", "wheel", "P", "R", "F1");
        for w in &r.wheels {
            let _ = writeln!(
                s,
                "  {:<12} {:>8.2} {:>8.2} {:>8.2}",
                w.wheel, w.scores.precision, w.scores.recall, w.scores.f1
            );
        }
        let _ = writeln!(s, "  {:<12} {:>8.2} {:>8.2} {:>8.2}", "fine", r.fine.precision, r.fine.recall, r.fine.f1);
        let _ = writeln!(s, "  S1 {:.2}  S2 {:.2}  EW {:.2}", r.s1, r.s2, r.ew);
    };
    section("corpus", report);
    for (g, r) in &report.groups {
        section(&format!("group {g}"), r);
    }
    s
}

/// Streams evaluation lines into a corpus report written to `out`; per-line
/// failures go to `errors`.
pub fn eval_stream<R: BufRead, W: Write, E: Write>(
    lexicon: &WheelLexicon,
    group_by: Option<&str>,
    format: ReportFormat,
    input: R,
    mut out: W,
    mut errors: E,
) -> Result<RunSummary, CliError> {
    let mut eval = CorpusEvaluator::new(lexicon);
    let mut summary = RunSummary::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        summary.lines += 1;
        match eval_sample(&line, group_by) {
            Ok(s) => eval.add(&s).expect("ground truth checked"),
            Err(e) => {
                summary.failures += 1;
                writeln!(errors, "{}", line_error(&line, e).json)?;
            }
        }
    }
    let report = eval.finish().map_err(|_| CliError::Data("no samples to evaluate".into()))?.scaled(100.0);
    match format {
        ReportFormat::Json => writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes"))?,
        ReportFormat::Table => write!(out, "{}", render_table(&report))?,
    }
    out.flush()?;
    Ok(summary)
}

/// Number of samples per label-set size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cardinality {
    pub pred: BTreeMap<usize, usize>,
    pub gt: BTreeMap<usize, usize>,
    pub samples: usize,
}

impl Cardinality {
    pub fn add(&mut self, pred: usize, gt: usize) {
        *self.pred.entry(pred).or_default() += 1;
        *self.gt.entry(gt).or_default() += 1;
        self.samples += 1;
    }

    fn rows(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let max = self.pred.keys().chain(self.gt.keys()).copied().max().unwrap_or(0);
        (0..=max).map(|k| (k, self.pred.get(&k).copied().unwrap_or(0), self.gt.get(&k).copied().unwrap_or(0)))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("count,pred_freq,gt_freq\n");
        for (k, p, g) in self.rows() {
            let _ = writeln!(s, "{k},{p},{g}");
        }
        s
    }

    pub fn to_table(&self) -> String {
        let n = self.samples.max(1) as f64;
        let mut s = format!("{:>5} {:>10} {:>8} {:>10} {:>8}\n", "count", "pred", "pred%", "gt", "gt%");
        for (k, p, g) in self.rows() {
            let _ = writeln!(s, "{k:>5} {p:>10} {:>8.2} {g:>10} {:>8.2}", 100.0 * p as f64 / n, 100.0 * g as f64 / n);
        }
        s
    }
}

pub fn cardinality_stream<R: BufRead, W: Write, E: Write>(
    input: R,
    csv: Option<&std::path::Path>,
    mut out: W,
    mut errors: E,
) -> Result<RunSummary, CliError> {
    let mut hist = Cardinality::default();
    let mut summary = RunSummary::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        summary.lines += 1;
        let parsed = label_pair(&line);
        match parsed {
            Ok((pred, gt, _)) => hist.add(pred.len(), gt.len()),
            Err(e) => {
                summary.failures += 1;
                writeln!(errors, "{}", line_error(&line, e).json)?;
            }
        }
    }
    if hist.samples == 0 {
        return Err(CliError::Data("no samples to count".into()));
    }
    if let Some(path) = csv {
        std::fs::write(path, hist.to_csv())?;
    }
    write!(out, "{}", hist.to_table())?;
    out.flush()?;
    Ok(summary)
}
