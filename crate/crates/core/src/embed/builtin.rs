use super::{EmbedError, Embedder, EmbeddingVector};
use crate::text::normalize_text;

pub const DEFAULT_BUILTIN_DIM: usize = 256;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Hashed character-trigram embedding of the normalized text.
///
/// Each trigram (a window of three Unicode scalar values; the whole text if
/// it is shorter than three) is hashed with 64-bit FNV-1a over its UTF-8
/// bytes and counted at `hash % dim`. The count vector is L2-normalized.
pub fn builtin_embed(text: &str, dim: usize) -> Result<EmbeddingVector, EmbedError> {
    if dim == 0 {
        return Err(EmbedError::Config("dimension must be positive".into()));
    }
    let norm = normalize_text(text);
    if norm.is_empty() {
        return Err(EmbedError::EmptyText(0));
    }
    let mut counts = vec![0.0f64; dim];
    let chars: Vec<(usize, char)> = norm.char_indices().collect();
    let mut add = |gram: &str| {
        let h = fnv1a64(gram.as_bytes());
        counts[(h % dim as u64) as usize] += 1.0;
    };
    if chars.len() < 3 {
        add(&norm);
    } else {
        for w in 0..=chars.len() - 3 {
            let start = chars[w].0;
            let end = chars.get(w + 3).map_or(norm.len(), |c| c.0);
            add(&norm[start..end]);
        }
    }
    EmbeddingVector::normalized(counts)
}

#[derive(Debug, Clone)]
pub struct BuiltinEmbedder {
    dim: usize,
}

impl BuiltinEmbedder {
    pub fn new(dim: usize) -> Self {
        BuiltinEmbedder { dim }
    }
}

impl Default for BuiltinEmbedder {
    fn default() -> Self {
        BuiltinEmbedder::new(DEFAULT_BUILTIN_DIM)
    }
}

impl Embedder for BuiltinEmbedder {
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        if texts.is_empty() {
            return Err(EmbedError::EmptyBatch);
        }
        texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                builtin_embed(t, self.dim).map_err(|e| match e {
                    EmbedError::EmptyText(_) => EmbedError::EmptyText(i),
                    other => other,
                })
            })
            .collect()
    }
}
