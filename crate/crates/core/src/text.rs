//! Text normalization and edit-distance similarity shared by evidence
//! matching, label grouping and the embedding cache.

/// Lowercases, strips punctuation, collapses whitespace runs and trims.
///
/// Punctuation is any Unicode punctuation or symbol character; it is
/// replaced by nothing, so `"don't"` becomes `"dont"`.
pub fn normalize_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for ch in s.chars() {
        if ch.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if is_punctuation(ch) {
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.extend(ch.to_lowercase());
    }
    out
}

fn is_punctuation(ch: char) -> bool {
    if ch.is_ascii() {
        return ch.is_ascii_punctuation();
    }
    // General punctuation, CJK punctuation, full-width forms and common symbols.
    matches!(ch,
        '\u{00A1}'..='\u{00BF}'
        | '\u{2010}'..='\u{2027}'
        | '\u{2030}'..='\u{205E}'
        | '\u{3000}'..='\u{303F}'
        | '\u{FF01}'..='\u{FF0F}'
        | '\u{FF1A}'..='\u{FF20}'
        | '\u{FF3B}'..='\u{FF40}'
        | '\u{FF5B}'..='\u{FF65}'
    )
}

/// `1 - dist(a, b) / max(|a|, |b|)` over Unicode scalar values; 1.0 when
/// both strings are empty.
///
/// Computed as `(max - dist) / max` so that ratios which are exactly
/// representable thresholds (17/20 = 0.85) compare equal to the literal.
pub fn levenshtein_similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    let dist = strsim::levenshtein(a, b);
    (longest - dist) as f64 / longest as f64
}
