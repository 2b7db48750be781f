use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use tracescore_core::grpo::{group_advantages, GrpoConfig};

use crate::schema::{string_field, AdvantageError, AdvantageRequest, AdvantageResponse, Rendered};
use crate::{CliError, RunSummary};

/// Normalizes rewards within each `group_id`; items keep their input order.
/// Every member of a group that cannot be normalized (fewer than two
/// members, non-finite rewards) gets an error item naming the group.
pub fn advantage_items(rows: Vec<Result<AdvantageRequest, Rendered>>, cfg: &GrpoConfig) -> Vec<Rendered> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, row) in rows.iter().enumerate() {
        if let Ok(r) = row {
            groups.entry(r.group_id.as_str()).or_default().push(i);
        }
    }
    let mut out: Vec<Option<Rendered>> = vec![None; rows.len()];
    for (group_id, members) in &groups {
        let rewards: Vec<f64> = members.iter().map(|&i| rows[i].as_ref().unwrap().reward).collect();
        match group_advantages(&rewards, cfg) {
            Ok(adv) => {
                for (&i, a) in members.iter().zip(adv.values) {
                    let r = rows[i].as_ref().unwrap();
                    out[i] = Some(Rendered::ok(&AdvantageResponse {
                        group_id: r.group_id.clone(),
                        id: r.id.clone(),
                        advantage: a,
                    }));
                }
            }
            Err(e) => {
                for &i in members {
                    let r = rows[i].as_ref().unwrap();
                    out[i] = Some(Rendered::err(&AdvantageError {
                        group_id: Some(r.group_id.clone()),
                        id: Some(r.id.clone()),
                        error: format!("group {group_id}: {e}"),
                    }));
                }
            }
        }
    }
    out.into_iter()
        .zip(rows)
        .map(|(done, row)| done.unwrap_or_else(|| row.expect_err("unparsed rows carry their error")))
        .collect()
}

pub fn parse_row(line: &str) -> Result<AdvantageRequest, Rendered> {
    serde_json::from_str::<AdvantageRequest>(line).map_err(|e| {
        Rendered::err(&AdvantageError {
            group_id: string_field(line, "group_id"),
            id: string_field(line, "id"),
            error: format!("invalid row: {e}"),
        })
    })
}

/// Groups can span the whole input, so rows are collected before output.
pub fn advantages_stream<R: BufRead, W: Write>(cfg: &GrpoConfig, input: R, mut out: W) -> Result<RunSummary, CliError> {
    let mut rows = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            rows.push(parse_row(&line));
        }
    }
    let items = advantage_items(rows, cfg);
    let mut summary = RunSummary::default();
    for item in &items {
        summary.lines += 1;
        summary.failures += usize::from(item.failed);
        writeln!(out, "{}", item.json)?;
    }
    out.flush()?;
    Ok(summary)
}
