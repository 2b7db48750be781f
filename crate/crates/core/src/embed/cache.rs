use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use lru::LruCache;

use super::{EmbedError, Embedder, EmbeddingVector};
use crate::text::normalize_text;

/// Wraps a provider with an LRU cache keyed by `normalize_text` output.
///
/// Inputs are validated and normalized before lookup; only distinct cache
/// misses are forwarded, in one provider call per `embed` call. The
/// provider always receives normalized text, so a cold and a warm cache
/// return identical vectors.
pub struct CachedEmbedder<E> {
    inner: E,
    cache: Mutex<LruCache<String, EmbeddingVector>>,
    max_text_chars: usize,
    provider_calls: AtomicUsize,
}

impl<E: Embedder> CachedEmbedder<E> {
    pub fn new(inner: E, capacity: usize, max_text_chars: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity.max(1)).unwrap();
        CachedEmbedder {
            inner,
            cache: Mutex::new(LruCache::new(capacity)),
            max_text_chars,
            provider_calls: AtomicUsize::new(0),
        }
    }

    /// Number of calls forwarded to the wrapped provider so far.
    pub fn provider_calls(&self) -> usize {
        self.provider_calls.load(Ordering::Relaxed)
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }
}

impl<E: Embedder> Embedder for CachedEmbedder<E> {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::EmptyBatch);
        }
        let mut keys = Vec::with_capacity(texts.len());
        for (index, t) in texts.iter().enumerate() {
            let len = t.chars().count();
            if len > self.max_text_chars {
                return Err(EmbedError::TextTooLong { index, len, max: self.max_text_chars });
            }
            let key = normalize_text(t);
            if key.is_empty() {
                return Err(EmbedError::EmptyText(index));
            }
            keys.push(key);
        }

        let mut out: Vec<Option<EmbeddingVector>> = vec![None; keys.len()];
        let mut misses: Vec<String> = Vec::new();
        {
            let mut cache = self.cache.lock().unwrap_or_else(|p| p.into_inner());
            for (slot, key) in out.iter_mut().zip(&keys) {
                match cache.get(key) {
                    Some(v) => *slot = Some(v.clone()),
                    None if !misses.contains(key) => misses.push(key.clone()),
                    None => {}
                }
            }
        }

        if !misses.is_empty() {
            self.provider_calls.fetch_add(1, Ordering::Relaxed);
            let fetched = self.inner.embed(&misses)?;
            if fetched.len() != misses.len() {
                return Err(EmbedError::Schema(format!(
                    "provider returned {} vectors for {} texts",
                    fetched.len(),
                    misses.len()
                )));
            }
            let mut cache = self.cache.lock().unwrap_or_else(|p| p.into_inner());
            for (key, vec) in misses.iter().zip(&fetched) {
                cache.put(key.clone(), vec.clone());
            }
            for (slot, key) in out.iter_mut().zip(&keys) {
                if slot.is_none() {
                    let pos = misses.iter().position(|m| m == key).expect("miss recorded");
                    *slot = Some(fetched[pos].clone());
                }
            }
        }
        let vectors: Vec<EmbeddingVector> = out.into_iter().map(|v| v.expect("filled")).collect();
        if let Some(first) = vectors.first() {
            if let Some(bad) = vectors.iter().find(|v| v.dim() != first.dim()) {
                return Err(EmbedError::DimMismatch(first.dim(), bad.dim()));
            }
        }
        Ok(vectors)
    }
}
