//! Independent oracles and random generators shared by the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

pub mod golden;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use tracescore_core::ew::WheelLexicon;

/// Textbook O(nm) edit distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

pub fn similarity_oracle(a: &str, b: &str) -> f64 {
    let m = a.chars().count().max(b.chars().count());
    if m == 0 {
        return 1.0;
    }
    (m - edit_distance(a, b)) as f64 / m as f64
}

/// Two-pass group normalization with the population standard deviation.
pub fn advantages_oracle(r: &[f64], eps: f64) -> Vec<f64> {
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let var = r.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 || r.iter().all(|x| *x == r[0]) {
        return vec![0.0; r.len()];
    }
    r.iter().map(|x| (x - mean) / (std + eps)).collect()
}

/// A random three-level lexicon plus the raw maps, built so that every
/// target is already canonical.
pub struct RandomLexicon {
    pub l1: BTreeMap<String, String>,
    pub l2: BTreeMap<String, String>,
    pub wheels: Vec<BTreeMap<String, String>>,
    pub vocab: Vec<String>,
    pub lexicon: WheelLexicon,
}

pub fn random_lexicon<R: Rng>(rng: &mut R) -> RandomLexicon {
    let n = rng.gen_range(8..30);
    let mut vocab: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    vocab.shuffle(rng);
    // tiers: 0 = l1 key, 1 = l2 key, 2 = wheel key or free, 3 = wheel target
    let tier: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let of = |t: &[u8]| -> Vec<String> {
        vocab.iter().zip(&tier).filter(|(_, x)| t.contains(x)).map(|(w, _)| w.clone()).collect()
    };
    let (t0, t1, t2, t3) = (of(&[0]), of(&[1]), of(&[2]), of(&[3]));
    let pick = |rng: &mut R, from: &[String]| from.choose(rng).cloned();

    let mut l1 = BTreeMap::new();
    let above0: Vec<String> = [t1.clone(), t2.clone(), t3.clone()].concat();
    for w in &t0 {
        if let Some(t) = pick(rng, &above0) {
            l1.insert(w.clone(), t);
        }
    }
    let mut l2 = BTreeMap::new();
    let above1: Vec<String> = [t2.clone(), t3.clone()].concat();
    for w in &t1 {
        if let Some(t) = pick(rng, &above1) {
            l2.insert(w.clone(), t);
        }
    }
    let k = rng.gen_range(1..=5);
    let wheels: Vec<BTreeMap<String, String>> = (0..k)
        .map(|_| {
            let mut m = BTreeMap::new();
            for w in &t2 {
                if rng.gen_bool(0.7) {
                    if let Some(t) = pick(rng, &t3) {
                        m.insert(w.clone(), t);
                    }
                }
            }
            m
        })
        .collect();
    let lexicon = WheelLexicon::new(
        l1.clone(),
        l2.clone(),
        wheels.iter().enumerate().map(|(i, m)| (format!("wheel{i}"), m.clone())).collect(),
    )
    .expect("generated lexicon is closed");
    vocab.push("zzunknown".into());
    RandomLexicon { l1, l2, wheels, vocab, lexicon }
}

impl RandomLexicon {
    fn step<'a>(map: &'a BTreeMap<String, String>, w: &'a str) -> &'a str {
        map.get(w).map_or(w, String::as_str)
    }

    pub fn group_word(&self, w: &str, wheel: usize) -> String {
        let a = Self::step(&self.l1, w);
        let b = Self::step(&self.l2, a);
        Self::step(&self.wheels[wheel], b).to_string()
    }

    /// Grouped, deduplicated labels in first-occurrence order.
    pub fn group(&self, labels: &[String], wheel: usize) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for l in labels {
            let g = self.group_word(l, wheel);
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    /// (precision, recall, f1) by brute-force intersection.
    pub fn set_scores(&self, pred: &[String], gt: &[String], wheel: usize) -> (f64, f64, f64) {
        let p = self.group(pred, wheel);
        let g = self.group(gt, wheel);
        if p.is_empty() {
            return (0.0, 0.0, 0.0);
        }
        let hits = p.iter().filter(|x| g.contains(x)).count() as f64;
        let precision = hits / p.len() as f64;
        let recall = if g.is_empty() { 0.0 } else { hits / g.len() as f64 };
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        (precision, recall, f1)
    }

    pub fn ew(&self, pred: &[String], gt: &[String]) -> f64 {
        let k = self.wheels.len();
        (0..k).map(|w| self.set_scores(pred, gt, w).2).sum::<f64>() / k as f64
    }

    pub fn random_labels<R: Rng>(&self, rng: &mut R, min: usize) -> Vec<String> {
        let n = rng.gen_range(min..=8);
        (0..n).map(|_| self.vocab.choose(rng).unwrap().clone()).collect()
    }
}

const WORDS: &[&str] = &[
    "tears",
    "smile",
    "voice",
    "trembling",
    "loud",
    "quiet",
    "frown",
    "jaw",
    "clenched",
    "eyes",
    "down",
    "pause",
    "laugh",
    "sigh",
    "shout",
    "hands",
    "shaking",
    "slumped",
    "bright",
    "flat",
    "tone",
    "rapid",
    "speech",
];

const LABELS: &[&str] = &[
    "happy",
    "sad",
    "angry",
    "anxious",
    "proud",
    "calm",
    "bored",
    "lonely",
    "surprised",
    "worried",
    "joyful",
    "sadness",
    "nervous",
    "content",
    "Excited!",
    "",
];

fn phrase<R: Rng>(rng: &mut R, max_words: usize) -> String {
    let n = rng.gen_range(1..=max_words);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn random_noise<R: Rng>(rng: &mut R) -> String {
    const ALPHABET: &[char] = &[
        '<', '>', '/', '[', ']', '{', '}', '"', ':', ',', '*', 'H', 'h', '1', '2', 'v', 'a', 't', ' ', '\n', 'x', 'é',
        '\\', '`',
    ];
    let n = rng.gen_range(0..120);
    (0..n).map(|_| *ALPHABET.choose(rng).unwrap()).collect()
}

/// Random tagged output: a plausible trace with random omissions, swaps
/// and corruptions, or plain noise.
pub fn random_trace<R: Rng>(rng: &mut R) -> String {
    if rng.gen_bool(0.1) {
        return random_noise(rng);
    }
    let n_hyp = rng.gen_range(0..5);
    let mut ev_ids = Vec::new();
    let hyps: Vec<serde_json::Value> = (0..n_hyp)
        .map(|i| {
            let ev: Vec<serde_json::Value> = (0..rng.gen_range(0..8))
                .map(|_| {
                    let id = format!("{}{}", ['v', 'a', 't', 'x'].choose(rng).unwrap(), rng.gen_range(1..6));
                    ev_ids.push(id.clone());
                    if rng.gen_bool(0.2) {
                        serde_json::Value::String(format!("{id}: {}", phrase(rng, 4)))
                    } else {
                        serde_json::json!({"id": id, "description": phrase(rng, 5)})
                    }
                })
                .collect();
            let assumption = if rng.gen_bool(0.9) { phrase(rng, 6) } else { String::new() };
            serde_json::json!({"id": format!("H{}", i + 1), "assumption": assumption, "evidence": ev})
        })
        .collect();
    let mut hyp_text = serde_json::to_string(&hyps).unwrap();
    if rng.gen_bool(0.1) {
        let cut = rng.gen_range(0..=hyp_text.len());
        hyp_text.truncate(cut);
    }

    let cite = |rng: &mut R| -> String {
        match rng.gen_range(0..4) {
            0 => format!("[H{}]", rng.gen_range(1..6)),
            1 if !ev_ids.is_empty() => format!("[{}]", ev_ids.choose(rng).unwrap()),
            2 => format!("[{}]", phrase(rng, 3)),
            _ => format!("[{}]", phrase(rng, 12)),
        }
    };
    let mut think = String::new();
    for header in ["Common", "Differences", "Decision"] {
        if rng.gen_bool(0.85) {
            think.push_str(&format!("**[{header}]** "));
        }
        for _ in 0..rng.gen_range(0..4) {
            think.push_str(&phrase(rng, 4));
            think.push(' ');
            think.push_str(&cite(rng));
            think.push(' ');
        }
        think.push('\n');
    }

    let labels: Vec<&str> = (0..rng.gen_range(0..6)).map(|_| *LABELS.choose(rng).unwrap()).collect();
    let answer = if rng.gen_bool(0.8) { serde_json::to_string(&labels).unwrap() } else { labels.join(", ") };

    let mut blocks = vec![
        format!("<hypotheses>\n{hyp_text}\n</hypotheses>"),
        format!("<think>\n{think}</think>"),
        format!("<answer>{answer}</answer>"),
    ];
    if rng.gen_bool(0.1) {
        blocks.swap(rng.gen_range(0..3), rng.gen_range(0..3));
    }
    if rng.gen_bool(0.1) {
        blocks.remove(rng.gen_range(0..3));
    }
    if rng.gen_bool(0.05) {
        let dup = blocks.choose(rng).unwrap().clone();
        blocks.push(dup);
    }
    let mut out = blocks.join("\n");
    if rng.gen_bool(0.1) && !out.is_empty() {
        let mut cut = rng.gen_range(0..out.len());
        while !out.is_char_boundary(cut) {
            cut -= 1;
        }
        out.truncate(cut);
    }
    out
}

pub fn random_gt<R: Rng>(rng: &mut R) -> (Vec<String>, Vec<String>) {
    let labels: Vec<String> =
        (0..rng.gen_range(1..4)).map(|_| LABELS[..LABELS.len() - 1].choose(rng).unwrap().to_string()).collect();
    let cues: Vec<String> = (0..rng.gen_range(0..4)).map(|_| phrase(rng, 5)).collect();
    (labels, cues)
}
