use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProviderError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider rejected the request with status {0}")]
    Status(u16),
    #[error("malformed provider response: {0}")]
    Schema(String),
    #[error("provider configuration: {0}")]
    Config(String),
}

impl ProviderError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, ProviderError::Transport(_))
    }
}

/// A prompt-in, text-out language model endpoint.
pub trait TextProvider: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError>;
}

impl<P: TextProvider + ?Sized> TextProvider for &P {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        (**self).complete(prompt)
    }
}

impl<P: TextProvider + ?Sized> TextProvider for Box<P> {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        (**self).complete(prompt)
    }
}

impl<P: TextProvider + ?Sized> TextProvider for Arc<P> {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        (**self).complete(prompt)
    }
}

#[derive(Serialize)]
struct CompletionRequest<'a> {
    prompt: &'a str,
}

#[derive(Deserialize)]
struct CompletionResponse {
    text: String,
}

/// HTTP provider: `POST {endpoint}` with `{"prompt": ...}`, response
/// `{"text": ...}`. Transport failures and 5xx responses are retried.
pub struct HttpProvider {
    endpoint: String,
    client: reqwest::blocking::Client,
    retries: u32,
}

impl HttpProvider {
    pub fn new(endpoint: impl Into<String>, timeout: Duration, retries: u32) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(HttpProvider { endpoint: endpoint.into(), client, retries })
    }

    fn call_once(&self, prompt: &str) -> Result<String, ProviderError> {
        let resp = self
            .client
            .post(&self.endpoint)
            .json(&CompletionRequest { prompt })
            .send()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() {
            return Err(ProviderError::Transport(format!("server returned {status}")));
        }
        if !status.is_success() {
            return Err(ProviderError::Status(status.as_u16()));
        }
        let body = resp.bytes().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let parsed: CompletionResponse =
            serde_json::from_slice(&body).map_err(|e| ProviderError::Schema(e.to_string()))?;
        Ok(parsed.text)
    }
}

impl TextProvider for HttpProvider {
    fn complete(&self, prompt: &str) -> Result<String, ProviderError> {
        let mut attempt = 0;
        loop {
            match self.call_once(prompt) {
                Err(e) if e.is_retryable() && attempt < self.retries => {
                    attempt += 1;
                    log::warn!("provider call to {} failed ({e}); retry {attempt}/{}", self.endpoint, self.retries);
                    std::thread::sleep(Duration::from_millis(50 * u64::from(attempt)));
                }
                other => return other,
            }
        }
    }
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub chat_endpoint: String,
    pub reasoner_endpoint: String,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_timeout", with = "secs")]
    pub timeout: Duration,
}

fn default_retries() -> u32 {
    2
}

fn default_timeout() -> Duration {
    Duration::from_secs(120)
}

impl ProviderConfig {
    pub fn new(chat_endpoint: impl Into<String>, reasoner_endpoint: impl Into<String>) -> Self {
        ProviderConfig {
            chat_endpoint: chat_endpoint.into(),
            reasoner_endpoint: reasoner_endpoint.into(),
            retries: default_retries(),
            timeout: default_timeout(),
        }
    }

    /// Builds the chat and reasoner clients.
    pub fn build(&self) -> Result<(HttpProvider, HttpProvider), ProviderError> {
        for (name, url) in [("chat_endpoint", &self.chat_endpoint), ("reasoner_endpoint", &self.reasoner_endpoint)] {
            if !(url.starts_with("http://") || url.starts_with("https://")) {
                return Err(ProviderError::Config(format!("{name} must be an http(s) URL, got {url:?}")));
            }
        }
        Ok((
            HttpProvider::new(&self.chat_endpoint, self.timeout, self.retries)?,
            HttpProvider::new(&self.reasoner_endpoint, self.timeout, self.retries)?,
        ))
    }
}
