use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::text::normalize_text;

const SAMPLE_LEXICON: &str = include_str!("../../data/sample_lexicon.toml");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon syntax error: {0}")]
    Syntax(String),
    #[error("K must be >= 1 (lexicon defines no wheels)")]
    NoWheels,
    #[error("{section}: empty key or target in entry {key:?} -> {target:?}")]
    EmptyEntry { section: String, key: String, target: String },
    #[error("{section}: key {key:?} appears twice after normalization")]
    DuplicateKey { section: String, key: String },
    #[error("{section}: entry {key:?} -> {target:?} is not canonical; {by} remaps {target:?} to {remapped:?}")]
    NotCanonical { section: String, key: String, target: String, by: String, remapped: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wheel {
    pub name: String,
    pub map: BTreeMap<String, String>,
}

/// Three-level label grouping maps: morphological base forms (`l1`),
/// synonym representatives (`l2`) and one clustering map per emotion wheel.
///
/// All keys and targets are stored in `normalize_text` form. A validated
/// lexicon guarantees that every grouping it induces is idempotent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WheelLexicon {
    l1: BTreeMap<String, String>,
    l2: BTreeMap<String, String>,
    wheels: Vec<Wheel>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LexiconFile {
    #[serde(default)]
    l1: BTreeMap<String, String>,
    #[serde(default)]
    l2: BTreeMap<String, String>,
    #[serde(default)]
    wheels: Vec<WheelFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WheelFile {
    name: Option<String>,
    #[serde(default)]
    map: BTreeMap<String, String>,
}

fn normalize_map(section: &str, raw: BTreeMap<String, String>) -> Result<BTreeMap<String, String>, LexiconError> {
    let mut out = BTreeMap::new();
    for (key, target) in raw {
        let (k, t) = (normalize_text(&key), normalize_text(&target));
        if k.is_empty() || t.is_empty() {
            return Err(LexiconError::EmptyEntry { section: section.into(), key, target });
        }
        if out.insert(k.clone(), t).is_some() {
            return Err(LexiconError::DuplicateKey { section: section.into(), key: k });
        }
    }
    Ok(out)
}

fn check_fixed(
    section: &str,
    entries: &BTreeMap<String, String>,
    against: &[(&str, &BTreeMap<String, String>)],
) -> Result<(), LexiconError> {
    for (key, target) in entries {
        for (by, map) in against {
            if let Some(remapped) = map.get(target) {
                if remapped != target {
                    return Err(LexiconError::NotCanonical {
                        section: section.into(),
                        key: key.clone(),
                        target: target.clone(),
                        by: (*by).into(),
                        remapped: remapped.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

impl WheelLexicon {
    /// Builds and validates a lexicon. Keys and targets are normalized first.
    ///
    /// Validation requires l1 targets to be fixed under l1, l2 targets fixed
    /// under l1 and l2, and each wheel's targets fixed under l1, l2 and that
    /// wheel.
    pub fn new(
        l1: BTreeMap<String, String>,
        l2: BTreeMap<String, String>,
        wheels: Vec<(String, BTreeMap<String, String>)>,
    ) -> Result<Self, LexiconError> {
        if wheels.is_empty() {
            return Err(LexiconError::NoWheels);
        }
        let l1 = normalize_map("l1", l1)?;
        let l2 = normalize_map("l2", l2)?;
        check_fixed("l1", &l1, &[("l1", &l1)])?;
        check_fixed("l2", &l2, &[("l1", &l1), ("l2", &l2)])?;
        let mut out = Vec::with_capacity(wheels.len());
        for (i, (name, map)) in wheels.into_iter().enumerate() {
            let section = format!("wheels[{i}] ({name})");
            let map = normalize_map(&section, map)?;
            check_fixed(&section, &map, &[("l1", &l1), ("l2", &l2), (&section, &map)])?;
            out.push(Wheel { name, map });
        }
        Ok(WheelLexicon { l1, l2, wheels: out })
    }

    pub fn from_toml_str(s: &str) -> Result<Self, LexiconError> {
        let file: LexiconFile = toml::from_str(s).map_err(|e| LexiconError::Syntax(e.to_string()))?;
        let wheels = file
            .wheels
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w.name.unwrap_or_else(|| format!("wheel{}", i + 1)), w.map))
            .collect();
        WheelLexicon::new(file.l1, file.l2, wheels)
    }

    /// The bundled five-wheel sample lexicon.
    pub fn sample() -> Self {
        WheelLexicon::from_toml_str(SAMPLE_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn sample_toml() -> &'static str {
        SAMPLE_LEXICON
    }

    /// Number of wheels (K).
    pub fn k(&self) -> usize {
        self.wheels.len()
    }

    pub fn wheels(&self) -> &[Wheel] {
        &self.wheels
    }

    pub fn l1(&self) -> &BTreeMap<String, String> {
        &self.l1
    }

    pub fn l2(&self) -> &BTreeMap<String, String> {
        &self.l2
    }

    /// L1 then L2 for an already-normalized word.
    pub fn synonym_form<'a>(&'a self, word: &'a str) -> &'a str {
        let base = self.l1.get(word).map_or(word, String::as_str);
        self.l2.get(base).map_or(base, String::as_str)
    }

    /// Full L1, L2, L3 grouping under `wheel` for an already-normalized word.
    pub fn wheel_form<'a>(&'a self, word: &'a str, wheel: usize) -> &'a str {
        let syn = self.synonym_form(word);
        self.wheels[wheel].map.get(syn).map_or(syn, String::as_str)
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<WheelLexicon, LexiconError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
    WheelLexicon::from_toml_str(&text)
}
