use std::path::PathBuf;

use tracescore_core::embed::{CachedEmbedder, Embedder, EmbedderConfig, ProviderKind};
use tracescore_core::ew::{load_lexicon, WheelLexicon};
use tracescore_core::grpo::GrpoConfig;
use tracescore_core::rewards::{MatchConfig, RewardWeights, ScoreConfig};
use tracescore_core::trace::DEFAULT_K_MAX;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EmbedderChoice {
    Builtin,
    Remote,
}

/// Configuration shared by the scoring commands and the service.
#[derive(Debug, Clone, clap::Args)]
pub struct ScoringSettings {
    /// TOML file with reward weights (acc, fmt, think, cite, evid, sem)
    #[arg(long, value_name = "PATH")]
    pub weights: Option<PathBuf>,
    /// TOML file with fuzzy-match settings
    #[arg(long, value_name = "PATH")]
    pub match_config: Option<PathBuf>,
    /// TOML lexicon; the bundled sample lexicon when omitted
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = EmbedderChoice::Builtin)]
    pub embedder: EmbedderChoice,
    /// Endpoint for the remote embedder
    #[arg(long, env = "EMBEDDER_URL", value_name = "URL")]
    pub embedder_url: Option<String>,
    /// Hypotheses kept per trace
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.04)]
    pub beta: f64,
}

impl Default for ScoringSettings {
    fn default() -> Self {
        ScoringSettings {
            weights: None,
            match_config: None,
            lexicon: None,
            embedder: EmbedderChoice::Builtin,
            embedder_url: None,
            k_max: DEFAULT_K_MAX,
            epsilon: 1e-4,
            beta: 0.04,
        }
    }
}

/// Everything a scoring call needs, resolved once at startup.
pub struct ScoringContext {
    pub score: ScoreConfig,
    pub lexicon: WheelLexicon,
    pub embedder: CachedEmbedder<Box<dyn Embedder>>,
    pub grpo: GrpoConfig,
}

fn config_err(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{what}: {e}"))
}

impl ScoringSettings {
    /// Only the lexicon (for commands that do not score traces).
    pub fn load_lexicon(&self) -> Result<WheelLexicon, CliError> {
        match &self.lexicon {
            Some(p) => load_lexicon(p).map_err(|e| config_err(&format!("lexicon {}", p.display()), e)),
            None => Ok(WheelLexicon::sample()),
        }
    }

    pub fn grpo(&self) -> Result<GrpoConfig, CliError> {
        let g = GrpoConfig { epsilon: self.epsilon, beta: self.beta, ..Default::default() };
        g.validate().map_err(|e| config_err("grpo", e))?;
        Ok(g)
    }

    pub fn build(&self) -> Result<ScoringContext, CliError> {
        let weights = match &self.weights {
            Some(p) => RewardWeights::load(p).map_err(|e| config_err(&format!("weights {}", p.display()), e))?,
            None => RewardWeights::default(),
        };
        let matching = match &self.match_config {
            Some(p) => MatchConfig::load(p).map_err(|e| config_err(&format!("match config {}", p.display()), e))?,
            None => MatchConfig::default(),
        };
        let score = ScoreConfig { weights, matching, k_max: self.k_max, ..Default::default() };
        score.validate().map_err(|e| config_err("score config", e))?;
        let lexicon = self.load_lexicon()?;
        if lexicon.k() < score.required_wheels {
            return Err(CliError::Config(format!(
                "lexicon defines {} wheels, {} required",
                lexicon.k(),
                score.required_wheels
            )));
        }
        let embed_cfg = EmbedderConfig {
            provider: match self.embedder {
                EmbedderChoice::Builtin => ProviderKind::Builtin,
                EmbedderChoice::Remote => ProviderKind::Remote,
            },
            remote_endpoint: self.embedder_url.clone(),
            ..Default::default()
        };
        let embedder = embed_cfg.build().map_err(|e| config_err("embedder", e))?;
        Ok(ScoringContext { score, lexicon, embedder, grpo: self.grpo()? })
    }
}
