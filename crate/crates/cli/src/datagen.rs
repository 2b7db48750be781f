use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Duration;

use tracescore_core::datagen::{
    run_pipeline, DatagenInput, FailureEntry, Phase, PipelineConfig, ProviderConfig, TextProvider,
};

use crate::{CliError, RunSummary};

/// Inputs handed to the pipeline at once.
pub const CHUNK_INPUTS: usize = 64;

#[derive(Debug, Clone, clap::Args)]
pub struct DatagenArgs {
    /// Endpoint producing observation graphs
    #[arg(long, env = "TRACESCORE_CHAT_URL", value_name = "URL")]
    pub chat_endpoint: Option<String>,
    /// Endpoint producing hypotheses and adjudication
    #[arg(long, env = "TRACESCORE_REASONER_URL", value_name = "URL")]
    pub reasoner_endpoint: Option<String>,
    /// TOML provider settings (chat_endpoint, reasoner_endpoint, retries, timeout)
    #[arg(long, value_name = "PATH")]
    pub provider_config: Option<PathBuf>,
    /// Keep only observation graphs
    #[arg(long)]
    pub grpo_mode: bool,
    #[arg(long, default_value_t = 4)]
    pub parallelism: usize,
    /// Transport retries per provider call
    #[arg(long)]
    pub retries: Option<u32>,
    /// Provider timeout in seconds
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Extra requests when an observation reply is not JSON
    #[arg(long, default_value_t = 2)]
    pub json_retries: u32,
    #[arg(long, value_name = "PATH")]
    pub obsg_template: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub reasoner_template: Option<PathBuf>,
    /// Failure ledger (JSON Lines); stderr when omitted
    #[arg(long, value_name = "PATH")]
    pub failures: Option<PathBuf>,
}

fn read_template(path: &Option<PathBuf>, default: String) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("template {}: {e}", p.display()))),
        None => Ok(default),
    }
}

impl DatagenArgs {
    pub fn provider_config(&self) -> Result<ProviderConfig, CliError> {
        let mut cfg = match &self.provider_config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("provider config {}: {e}", p.display())))?;
                toml::from_str::<ProviderConfig>(&text)
                    .map_err(|e| CliError::Config(format!("provider config {}: {e}", p.display())))?
            }
            None => ProviderConfig::new(
                self.chat_endpoint.clone().ok_or_else(|| CliError::Config("--chat-endpoint is required".into()))?,
                self.reasoner_endpoint.clone().unwrap_or_default(),
            ),
        };
        if let Some(url) = &self.chat_endpoint {
            cfg.chat_endpoint = url.clone();
        }
        if let Some(url) = &self.reasoner_endpoint {
            cfg.reasoner_endpoint = url.clone();
        }
        if self.grpo_mode && cfg.reasoner_endpoint.is_empty() {
            // never called in observation-only mode
            cfg.reasoner_endpoint = cfg.chat_endpoint.clone();
        }
        if cfg.reasoner_endpoint.is_empty() {
            return Err(CliError::Config("--reasoner-endpoint is required unless --grpo-mode is set".into()));
        }
        if let Some(r) = self.retries {
            cfg.retries = r;
        }
        if let Some(t) = self.timeout {
            cfg.timeout = Duration::try_from_secs_f64(t).map_err(|e| CliError::Config(format!("--timeout: {e}")))?;
        }
        Ok(cfg)
    }

    pub fn pipeline_config(&self) -> Result<PipelineConfig, CliError> {
        let d = PipelineConfig::default();
        let cfg = PipelineConfig {
            obsg_template: read_template(&self.obsg_template, d.obsg_template)?,
            reasoner_template: read_template(&self.reasoner_template, d.reasoner_template)?,
            json_retries: self.json_retries,
            grpo_mode: self.grpo_mode,
            parallelism: self.parallelism,
            ..d
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Runs the pipeline over DatagenInput lines in chunks, writing records to
/// `out` and failures to `ledger`, both in input order.
pub fn datagen_stream<R: BufRead, W: Write, L: Write>(
    chat: &dyn TextProvider,
    reasoner: &dyn TextProvider,
    cfg: &PipelineConfig,
    input: R,
    mut out: W,
    mut ledger: L,
) -> Result<RunSummary, CliError> {
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let mut summary = RunSummary::default();
    let mut lines = input.lines();
    let mut index = 0usize;
    loop {
        let mut batch = Vec::with_capacity(CHUNK_INPUTS);
        let mut positions = Vec::with_capacity(CHUNK_INPUTS);
        for line in lines.by_ref() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let here = index;
            index += 1;
            match serde_json::from_str::<DatagenInput>(&line) {
                Ok(i) => {
                    batch.push(i);
                    positions.push(here);
                }
                Err(e) => {
                    summary.lines += 1;
                    summary.failures += 1;
                    let entry = FailureEntry {
                        index: here,
                        id: crate::schema::string_field(&line, "id").unwrap_or_default(),
                        phase: Phase::Input,
                        error: format!("invalid input line: {e}"),
                    };
                    writeln!(ledger, "{}", serde_json::to_string(&entry).expect("entry serializes"))?;
                }
            }
            if batch.len() == CHUNK_INPUTS {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }
        let output = run_pipeline(&batch, chat, reasoner, cfg).map_err(|e| CliError::Config(e.to_string()))?;
        summary.lines += batch.len();
        summary.failures += output.failures.len();
        for r in &output.records {
            writeln!(out, "{}", serde_json::to_string(r).expect("record serializes"))?;
        }
        for mut f in output.failures {
            f.index = positions[f.index];
            writeln!(ledger, "{}", serde_json::to_string(&f).expect("entry serializes"))?;
        }
    }
    out.flush()?;
    ledger.flush()?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tracescore_core::datagen::ProviderError;

    struct Chat;
    impl TextProvider for Chat {
        fn complete(&self, _: &str) -> Result<String, ProviderError> {
            Ok(r#"{"evidence":[{"id":"v1","description":"head down"}]}"#.into())
        }
    }

    struct Reasoner;
    impl TextProvider for Reasoner {
        fn complete(&self, _: &str) -> Result<String, ProviderError> {
            Ok(r#"{"hypotheses":[{"assumption":"sad","evidence_ids_top5":["v1"]}],"think":"**[Common]** [v1] **[Differences]** [H1] **[Decision]** [H1]"}"#.into())
        }
    }

    #[test]
    fn ledger_indexes_are_global() {
        let input = [
            r#"{"id":"a","video_text":"x","gt_labels":["sad"]}"#,
            r#"{"id":"b"}"#,
            r#"{"id":"c","video_text":"x","gt_labels":[]}"#,
            r#"{"id":"d","audio_text":"y","gt_labels":["sad"]}"#,
        ]
        .join("\n");
        let mut out = Vec::new();
        let mut ledger = Vec::new();
        let s = datagen_stream(&Chat, &Reasoner, &PipelineConfig::default(), input.as_bytes(), &mut out, &mut ledger)
            .unwrap();
        assert_eq!(s, RunSummary { lines: 4, failures: 2 });
        let records: Vec<serde_json::Value> =
            String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(records.iter().map(|r| r["id"].as_str().unwrap()).collect::<Vec<_>>(), ["a", "d"]);
        let ledger: Vec<FailureEntry> =
            String::from_utf8(ledger).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!((ledger[0].index, ledger[0].phase), (1, Phase::Input));
        assert_eq!((ledger[1].index, ledger[1].id.as_str()), (2, "c"));
    }

    #[test]
    fn provider_flags() {
        let args = DatagenArgs {
            chat_endpoint: Some("http://chat".into()),
            reasoner_endpoint: None,
            provider_config: None,
            grpo_mode: false,
            parallelism: 2,
            retries: Some(0),
            timeout: Some(2.5),
            json_retries: 2,
            obsg_template: None,
            reasoner_template: None,
            failures: None,
        };
        assert!(matches!(args.provider_config(), Err(CliError::Config(_))));
        let grpo = DatagenArgs { grpo_mode: true, ..args.clone() };
        let cfg = grpo.provider_config().unwrap();
        assert_eq!((cfg.retries, cfg.timeout), (0, Duration::from_millis(2500)));
        let zero = DatagenArgs { parallelism: 0, ..args };
        assert!(matches!(zero.pipeline_config(), Err(CliError::Config(_))));
    }
}
