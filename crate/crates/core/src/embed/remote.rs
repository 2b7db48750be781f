use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EmbedError, Embedder, EmbeddingVector};

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [String],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

/// Client for an HTTP embedding service.
///
/// Protocol: `POST {endpoint}` with `{"texts": [...]}`; the response is
/// `{"vectors": [[...], ...], "dim": n}`. Transport failures and 5xx
/// responses are retried up to `retries` times; schema violations are not.
pub struct RemoteEmbedder {
    endpoint: String,
    client: reqwest::blocking::Client,
    retries: u32,
}

impl RemoteEmbedder {
    pub fn new(endpoint: impl Into<String>, timeout: Duration, retries: u32) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| EmbedError::Config(e.to_string()))?;
        Ok(RemoteEmbedder { endpoint: endpoint.into(), client, retries })
    }

    fn call_once(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let resp = self
            .client
            .post(&self.endpoint)
            .json(&EmbedRequest { texts })
            .send()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() {
            return Err(EmbedError::Transport(format!("server returned {status}")));
        }
        if !status.is_success() {
            return Err(EmbedError::Schema(format!("server returned {status}")));
        }
        let body = resp.bytes().map_err(|e| EmbedError::Transport(e.to_string()))?;
        let parsed: EmbedResponse = serde_json::from_slice(&body).map_err(|e| EmbedError::Schema(e.to_string()))?;
        validate_response(parsed, texts.len())
    }
}

fn validate_response(resp: EmbedResponse, expected: usize) -> Result<Vec<EmbeddingVector>, EmbedError> {
    if resp.vectors.len() != expected {
        return Err(EmbedError::Schema(format!("expected {expected} vectors, got {}", resp.vectors.len())));
    }
    if resp.dim == 0 {
        return Err(EmbedError::Schema("dim must be positive".into()));
    }
    resp.vectors
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            if v.len() != resp.dim {
                return Err(EmbedError::Schema(format!("vector {i} has length {}, dim is {}", v.len(), resp.dim)));
            }
            EmbeddingVector::from_unit(v).map_err(|e| EmbedError::Schema(format!("vector {i}: {e}")))
        })
        .collect()
}

impl Embedder for RemoteEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::EmptyBatch);
        }
        let mut attempt = 0;
        loop {
            match self.call_once(texts) {
                Err(e) if e.is_retryable() && attempt < self.retries => {
                    attempt += 1;
                    log::warn!("embedding call failed ({e}); retry {attempt}/{}", self.retries);
                    std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
                }
                other => return other,
            }
        }
    }
}
