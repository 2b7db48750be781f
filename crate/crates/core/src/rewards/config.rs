use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RewardError;

/// Per-component weights of the composite reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    #[serde(alias = "lambda_acc")]
    pub acc: f64,
    #[serde(alias = "lambda_fmt")]
    pub fmt: f64,
    #[serde(alias = "lambda_think")]
    pub think: f64,
    #[serde(alias = "lambda_cite")]
    pub cite: f64,
    #[serde(alias = "lambda_evid")]
    pub evid: f64,
    #[serde(alias = "lambda_sem")]
    pub sem: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights { acc: 4.0, fmt: 0.5, think: 0.5, cite: 1.0, evid: 2.0, sem: 2.0 }
    }
}

impl RewardWeights {
    pub fn as_array(&self) -> [f64; 6] {
        [self.acc, self.fmt, self.think, self.cite, self.evid, self.sem]
    }

    /// Upper bound of the composite reward.
    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }

    pub fn validate(&self) -> Result<(), RewardError> {
        const NAMES: [&str; 6] = ["acc", "fmt", "think", "cite", "evid", "sem"];
        for (name, w) in NAMES.iter().zip(self.as_array()) {
            if !w.is_finite() || w < 0.0 {
                return Err(RewardError::Config(format!(
                    "weight {name} must be a finite non-negative number, got {w}"
                )));
            }
        }
        Ok(())
    }

    /// Reads weights from TOML. Keys are `acc`, `fmt`, `think`, `cite`,
    /// `evid`, `sem` (or the same with a `lambda_` prefix), optionally under
    /// a `[weights]` table; missing keys keep their defaults.
    pub fn from_toml_str(s: &str) -> Result<Self, RewardError> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wrapped {
            weights: RewardWeights,
        }
        let table: toml::Table = toml::from_str(s).map_err(|e| RewardError::Config(e.to_string()))?;
        let weights = if table.contains_key("weights") {
            toml::from_str::<Wrapped>(s).map(|w| w.weights)
        } else {
            toml::from_str::<RewardWeights>(s)
        }
        .map_err(|e| RewardError::Config(e.to_string()))?;
        weights.validate()?;
        Ok(weights)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RewardError> {
        Self::from_toml_str(&read(path.as_ref())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityNormalizer {
    /// `1 - dist / max(|a|, |b|)`
    #[default]
    MaxLength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchConfig {
    pub levenshtein_threshold: f64,
    pub similarity_normalizer: SimilarityNormalizer,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig { levenshtein_threshold: 0.85, similarity_normalizer: SimilarityNormalizer::MaxLength }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        let t = self.levenshtein_threshold;
        if !(t > 0.0 && t <= 1.0) {
            return Err(RewardError::Config(format!("levenshtein_threshold must be in (0, 1], got {t}")));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, RewardError> {
        let cfg: MatchConfig = toml::from_str(s).map_err(|e| RewardError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RewardError> {
        Self::from_toml_str(&read(path.as_ref())?)
    }
}

fn read(path: &Path) -> Result<String, RewardError> {
    std::fs::read_to_string(path).map_err(|e| RewardError::Config(format!("cannot read {}: {e}", path.display())))
}

/// Everything `score_trace` needs besides the lexicon and the embedder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreConfig {
    pub weights: RewardWeights,
    pub matching: MatchConfig,
    /// Hypotheses beyond this count are dropped at parse time.
    pub k_max: usize,
    /// Minimum number of wheels the lexicon must define for the accuracy
    /// reward.
    pub required_wheels: usize,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            weights: RewardWeights::default(),
            matching: MatchConfig::default(),
            k_max: crate::trace::DEFAULT_K_MAX,
            required_wheels: 5,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        self.weights.validate()?;
        self.matching.validate()?;
        if self.k_max == 0 {
            return Err(RewardError::Config("k_max must be >= 1".into()));
        }
        Ok(())
    }
}
