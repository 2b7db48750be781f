//! Cold-start sample generation: observation graph from modality text, then
//! hypotheses and adjudication from a reasoner, then deterministic
//! post-processing into canonical tagged traces.

mod obsg;
mod prompt;
mod provider;
mod reasoner;

pub use obsg::{generate_obsg, obsg_from_value, ObsG, ObsGOutcome};
pub use prompt::{
    construct_obsg_prompt, construct_reasoner_prompt, fill_template, ModalText, ABSENT_MARKER, DEFAULT_OBSG_TEMPLATE,
    DEFAULT_REASONER_TEMPLATE,
};
pub use provider::{HttpProvider, ProviderConfig, ProviderError, TextProvider};
pub use reasoner::{
    assemble_sample, derive_modalities, enforce_evidence_cap, parse_reasoner_output, GenSample, ReasonerOutput,
    MAX_HYPOTHESES,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::LabelSet;
use crate::rewards::GtAnnotation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DatagenError {
    #[error("no modality text: video, audio and transcript are all empty")]
    NoModalityText,
    #[error("template references unknown slot {{{{{0}}}}}")]
    UnknownSlot(String),
    #[error("template has no slot {{{{{0}}}}}")]
    MissingSlot(String),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("reply was not valid JSON after {attempts} attempts: {last_error}")]
    RetriesExhausted { attempts: u32, last_error: String },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unparseable reply at line {line}, column {column}: {message}")]
    Unparseable { line: usize, column: usize, message: String },
    #[error("hypothesis count out of range 1..3 (got {0})")]
    HypothesisCount(usize),
    #[error("ground-truth label set is empty")]
    EmptyGroundTruth,
    #[error("no hypotheses to assemble")]
    EmptyHypotheses,
    #[error("think is missing sections: {}", .0.join(", "))]
    IncompleteThink(Vec<String>),
    #[error("assembled trace does not parse cleanly: {}", .0.join("; "))]
    AssemblyInvalid(Vec<String>),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// One line of pipeline input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatagenInput {
    pub id: String,
    #[serde(default)]
    pub video_text: String,
    #[serde(default)]
    pub audio_text: String,
    #[serde(default)]
    pub transcript: String,
    pub gt_labels: Vec<String>,
    #[serde(default)]
    pub gt_cues: Vec<String>,
}

/// One line of pipeline output. `trace` is absent in observation-only mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatagenRecord {
    pub id: String,
    pub obsg: ObsG,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    pub gt_labels: LabelSet,
    pub gt_cues: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Input,
    Observation,
    Reasoning,
    Assembly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureEntry {
    pub index: usize,
    pub id: String,
    pub phase: Phase,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub obsg_template: String,
    pub reasoner_template: String,
    /// Re-asks for the observation graph when the reply is not JSON.
    pub json_retries: u32,
    pub top_k: usize,
    /// Keep only the observation graph (for RL data).
    pub grpo_mode: bool,
    pub parallelism: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            obsg_template: DEFAULT_OBSG_TEMPLATE.to_string(),
            reasoner_template: DEFAULT_REASONER_TEMPLATE.to_string(),
            json_retries: 2,
            top_k: 5,
            grpo_mode: false,
            parallelism: 4,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.top_k == 0 {
            return Err(DatagenError::Config("top_k must be >= 1".into()));
        }
        if self.parallelism == 0 {
            return Err(DatagenError::Config("parallelism must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    /// Successful records, in input order.
    pub records: Vec<DatagenRecord>,
    pub failures: Vec<FailureEntry>,
}

/// Runs all phases for one input.
pub fn process_input(
    input: &DatagenInput,
    chat: &dyn TextProvider,
    reasoner: &dyn TextProvider,
    cfg: &PipelineConfig,
) -> Result<DatagenRecord, (Phase, DatagenError)> {
    let gt =
        GtAnnotation { labels: LabelSet::new(input.gt_labels.iter().map(String::as_str)), cues: input.gt_cues.clone() };
    if gt.labels.is_empty() {
        return Err((Phase::Input, DatagenError::EmptyGroundTruth));
    }
    let modal = ModalText {
        video: input.video_text.clone(),
        audio: input.audio_text.clone(),
        transcript: input.transcript.clone(),
    };
    let observe = || -> Result<ObsG, DatagenError> {
        let prompt = construct_obsg_prompt(&modal, &cfg.obsg_template)?;
        let out = generate_obsg(&prompt, chat, cfg.json_retries)?;
        if out.retries > 0 {
            log::info!("{}: observation graph needed {} retries", input.id, out.retries);
        }
        Ok(out.obsg)
    };
    let obsg = observe().map_err(|e| (Phase::Observation, e))?;
    let record = |trace| DatagenRecord {
        id: input.id.clone(),
        obsg: obsg.clone(),
        trace,
        gt_labels: gt.labels.clone(),
        gt_cues: gt.cues.clone(),
    };
    if cfg.grpo_mode {
        return Ok(record(None));
    }

    let reason = || -> Result<ReasonerOutput, DatagenError> {
        let prompt = construct_reasoner_prompt(&obsg, &gt, &cfg.reasoner_template)?;
        parse_reasoner_output(&reasoner.complete(&prompt)?)
    };
    let out = reason().map_err(|e| (Phase::Reasoning, e))?;
    for d in &out.diagnostics {
        log::warn!("{}: {d}", input.id);
    }
    let hypotheses = derive_modalities(enforce_evidence_cap(out.hypotheses, cfg.top_k));
    let sample = assemble_sample(&obsg, &hypotheses, &out.think, &gt).map_err(|e| (Phase::Assembly, e))?;
    Ok(record(Some(sample.assembled)))
}

/// Processes `inputs` with at most `cfg.parallelism` concurrent workers.
/// Per-input failures land in the ledger; only configuration problems are
/// returned as errors.
pub fn run_pipeline(
    inputs: &[DatagenInput],
    chat: &dyn TextProvider,
    reasoner: &dyn TextProvider,
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, DatagenError> {
    use rayon::prelude::*;

    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| DatagenError::Config(e.to_string()))?;
    let results: Vec<_> = pool.install(|| inputs.par_iter().map(|i| process_input(i, chat, reasoner, cfg)).collect());

    let mut output = PipelineOutput::default();
    for (index, (input, result)) in inputs.iter().zip(results).enumerate() {
        match result {
            Ok(r) => output.records.push(r),
            Err((phase, e)) => {
                output.failures.push(FailureEntry { index, id: input.id.clone(), phase, error: e.to_string() })
            }
        }
    }
    Ok(output)
}
