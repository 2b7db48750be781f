use std::collections::HashSet;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use tracescore_core::labels::LabelSet;
use tracescore_core::rewards::{score_parsed, GtAnnotation};
use tracescore_core::trace::parse_trace;

use crate::schema::{string_field, ItemError, Rendered, ScoreRequest, ScoreResponse};
use crate::{CliError, RunSummary, ScoringContext};

/// Lines scored together; bounds memory for arbitrarily long inputs.
pub const CHUNK_LINES: usize = 512;

pub fn score_request(ctx: &ScoringContext, req: &ScoreRequest) -> Result<ScoreResponse, String> {
    let gt =
        GtAnnotation { labels: LabelSet::new(req.gt_labels.iter().map(String::as_str)), cues: req.gt_cues.clone() };
    let parsed = parse_trace(&req.trace, ctx.score.k_max);
    let breakdown = score_parsed(&parsed, &gt, &ctx.score, &ctx.lexicon, &ctx.embedder).map_err(|e| e.to_string())?;
    Ok(ScoreResponse { id: req.id.clone(), breakdown, parse_diagnostics: parsed.format_report.diagnostics })
}

fn render(ctx: &ScoringContext, req: &ScoreRequest) -> Rendered {
    match score_request(ctx, req) {
        Ok(r) => Rendered::ok(&r),
        Err(error) => Rendered::err(&ItemError { id: Some(req.id.clone()), error }),
    }
}

/// A batch item before scoring: a request, or an error already decided.
pub enum Pending {
    Request(ScoreRequest),
    Failed(Rendered),
}

/// Tracks ids across a batch (or a whole stream) to reject duplicates.
#[derive(Default)]
pub struct IdTracker(HashSet<String>);

impl IdTracker {
    pub fn admit(&mut self, req: ScoreRequest) -> Pending {
        if self.0.insert(req.id.clone()) {
            Pending::Request(req)
        } else {
            Pending::Failed(Rendered::err(&ItemError {
                id: Some(req.id.clone()),
                error: format!("duplicate id {:?} in batch", req.id),
            }))
        }
    }

    pub fn admit_line(&mut self, line: &str) -> Pending {
        match serde_json::from_str::<ScoreRequest>(line) {
            Ok(req) => self.admit(req),
            Err(e) => Pending::Failed(Rendered::err(&ItemError {
                id: string_field(line, "id"),
                error: format!("invalid request: {e}"),
            })),
        }
    }
}

/// Scores a batch in parallel; output order follows input order.
pub fn score_pending(ctx: &ScoringContext, items: Vec<Pending>) -> Vec<Rendered> {
    items
        .into_par_iter()
        .map(|p| match p {
            Pending::Request(req) => render(ctx, &req),
            Pending::Failed(r) => r,
        })
        .collect()
}

pub fn score_batch(ctx: &ScoringContext, requests: Vec<ScoreRequest>) -> Vec<Rendered> {
    let mut ids = IdTracker::default();
    let pending = requests.into_iter().map(|r| ids.admit(r)).collect();
    score_pending(ctx, pending)
}

/// Reads ScoreRequest lines and writes one response or error line per
/// non-blank input line.
pub fn score_stream<R: BufRead, W: Write>(ctx: &ScoringContext, input: R, mut out: W) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let mut ids = IdTracker::default();
    let mut chunk = Vec::with_capacity(CHUNK_LINES);
    let mut lines = input.lines();
    loop {
        chunk.clear();
        for line in lines.by_ref() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            chunk.push(ids.admit_line(&line));
            if chunk.len() == CHUNK_LINES {
                break;
            }
        }
        if chunk.is_empty() {
            break;
        }
        for item in score_pending(ctx, std::mem::take(&mut chunk)) {
            summary.lines += 1;
            summary.failures += usize::from(item.failed);
            writeln!(out, "{}", item.json)?;
        }
    }
    out.flush()?;
    Ok(summary)
}
