//! Sentence embeddings for semantic grounding: a provider trait, a
//! deterministic hashed-trigram embedder, an HTTP client for a remote
//! embedding service, and an LRU cache keyed by normalized text.

mod builtin;
mod cache;
mod remote;

pub use builtin::{builtin_embed, BuiltinEmbedder, DEFAULT_BUILTIN_DIM};
pub use cache::CachedEmbedder;
pub use remote::RemoteEmbedder;

use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of a provider vector's L2 norm from 1.
pub const NORM_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_TEXT_CHARS: usize = 8192;
pub const DEFAULT_CACHE_CAPACITY: usize = 4096;
pub const EMBEDDER_URL_ENV: &str = "EMBEDDER_URL";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("empty batch")]
    EmptyBatch,
    #[error("empty text at index {0}")]
    EmptyText(usize),
    #[error("text at index {index} has {len} chars, limit is {max}")]
    TextTooLong { index: usize, len: usize, max: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("zero or non-finite vector")]
    Degenerate,
    #[error("embedding transport failure: {0}")]
    Transport(String),
    #[error("embedding response schema violation: {0}")]
    Schema(String),
    #[error("embedder configuration: {0}")]
    Config(String),
}

impl EmbedError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, EmbedError::Transport(_))
    }
}

/// A unit-length embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    /// Scales `values` to unit L2 norm.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self, EmbedError> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(EmbedError::Degenerate);
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(EmbeddingVector { values })
    }

    /// Accepts an already-normalized vector, rejecting it when its norm is
    /// off by more than [`NORM_TOLERANCE`].
    pub fn from_unit(values: Vec<f64>) -> Result<Self, EmbedError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::Degenerate);
        }
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(EmbedError::Schema(format!("vector norm {norm} is not 1")));
        }
        Ok(EmbeddingVector { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Dot product of two unit vectors, clamped to [-1, 1].
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EmbedError> {
    if u.dim() != v.dim() {
        return Err(EmbedError::DimMismatch(u.dim(), v.dim()));
    }
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    Ok(dot.clamp(-1.0, 1.0))
}

/// Maps texts to embeddings, one per input, in order.
pub trait Embedder: Send + Sync {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError>;
}

impl<E: Embedder + ?Sized> Embedder for Box<E> {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        (**self).embed(texts)
    }
}

impl<E: Embedder + ?Sized> Embedder for Arc<E> {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        (**self).embed(texts)
    }
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        (**self).embed(texts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    #[default]
    Builtin,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedderConfig {
    pub provider: ProviderKind,
    pub remote_endpoint: Option<String>,
    pub cache_capacity: usize,
    pub builtin_dim: usize,
    pub max_text_chars: usize,
    pub retries: u32,
    #[serde(with = "secs")]
    pub timeout: Duration,
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        Duration::try_from_secs_f64(v).map_err(serde::de::Error::custom)
    }
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        EmbedderConfig {
            provider: ProviderKind::Builtin,
            remote_endpoint: None,
            cache_capacity: DEFAULT_CACHE_CAPACITY,
            builtin_dim: DEFAULT_BUILTIN_DIM,
            max_text_chars: DEFAULT_MAX_TEXT_CHARS,
            retries: 2,
            timeout: Duration::from_secs(30),
        }
    }
}

impl EmbedderConfig {
    /// Fills `remote_endpoint` from `EMBEDDER_URL` when unset.
    pub fn with_env(mut self) -> Self {
        if self.remote_endpoint.is_none() {
            self.remote_endpoint = std::env::var(EMBEDDER_URL_ENV).ok().filter(|s| !s.is_empty());
        }
        self
    }

    /// Builds the configured provider wrapped in a cache.
    pub fn build(&self) -> Result<CachedEmbedder<Box<dyn Embedder>>, EmbedError> {
        let inner: Box<dyn Embedder> = match self.provider {
            ProviderKind::Builtin => {
                if self.builtin_dim == 0 {
                    return Err(EmbedError::Config("builtin_dim must be positive".into()));
                }
                Box::new(BuiltinEmbedder::new(self.builtin_dim))
            }
            ProviderKind::Remote => {
                let endpoint = self.remote_endpoint.clone().ok_or_else(|| {
                    EmbedError::Config(format!("remote provider needs an endpoint (set {EMBEDDER_URL_ENV})"))
                })?;
                Box::new(RemoteEmbedder::new(endpoint, self.timeout, self.retries)?)
            }
        };
        Ok(CachedEmbedder::new(inner, self.cache_capacity, self.max_text_chars))
    }
}
