//! Group-relative advantages and the value of the unclipped GRPO surrogate
//! loss, computed from rewards and supplied token log-probabilities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rewards::RewardBreakdown;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrpoError {
    #[error("group has {0} members; at least 2 are required")]
    GroupTooSmall(usize),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty log-probability sequence")]
    EmptySequence,
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum StdMode {
    #[default]
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrpoConfig {
    pub epsilon: f64,
    pub beta: f64,
    pub std_mode: StdMode,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        GrpoConfig { epsilon: 1e-4, beta: 0.04, std_mode: StdMode::Population }
    }
}

impl GrpoConfig {
    pub fn validate(&self) -> Result<(), GrpoError> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(GrpoError::Config(format!("epsilon must be finite and >= 0, got {}", self.epsilon)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(GrpoError::Config(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageVector {
    pub values: Vec<f64>,
    pub epsilon: f64,
}

/// Token log-probabilities of one trajectory under the policy and the
/// reference model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenLogProbs {
    pub policy: Vec<f64>,
    pub reference: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryGroup {
    pub rewards: Vec<f64>,
    /// Either empty or one entry per reward.
    #[serde(default)]
    pub logprobs: Vec<TokenLogProbs>,
}

fn check_finite(values: &[f64]) -> Result<(), GrpoError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(GrpoError::NonFinite(i)),
        None => Ok(()),
    }
}

/// `(r - mean) / (std + epsilon)` with the population standard deviation.
///
/// A group whose rewards are all equal gets all-zero advantages for any
/// epsilon, including zero.
pub fn group_advantages(rewards: &[f64], cfg: &GrpoConfig) -> Result<AdvantageVector, GrpoError> {
    cfg.validate()?;
    if rewards.len() < 2 {
        return Err(GrpoError::GroupTooSmall(rewards.len()));
    }
    check_finite(rewards)?;
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let centered: Vec<f64> = rewards.iter().map(|r| r - mean).collect();
    let std = (centered.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
    let values = if std == 0.0 || rewards.iter().all(|r| *r == rewards[0]) {
        vec![0.0; rewards.len()]
    } else {
        let denom = std + cfg.epsilon;
        centered.iter().map(|d| d / denom).collect()
    };
    Ok(AdvantageVector { values, epsilon: cfg.epsilon })
}

/// Mean over tokens of `exp(d) - d - 1` with `d = ref - policy`; never
/// negative.
pub fn kl_per_trajectory(logp_policy: &[f64], logp_ref: &[f64]) -> Result<f64, GrpoError> {
    if logp_policy.len() != logp_ref.len() {
        return Err(GrpoError::LengthMismatch(logp_policy.len(), logp_ref.len()));
    }
    if logp_policy.is_empty() {
        return Err(GrpoError::EmptySequence);
    }
    check_finite(logp_policy)?;
    check_finite(logp_ref)?;
    let total: f64 = logp_policy
        .iter()
        .zip(logp_ref)
        .map(|(p, r)| {
            let d = r - p;
            // exp_m1 keeps precision for small d
            (d.exp_m1() - d).max(0.0)
        })
        .sum();
    Ok(total / logp_policy.len() as f64)
}

/// `-(1/G) * sum_g (A_g - beta * KL_g)` with the importance weight taken at
/// its forward value of 1. KL terms are zero when the group carries no
/// log-probabilities.
pub fn surrogate_loss_value(
    group: &TrajectoryGroup,
    advantages: &AdvantageVector,
    cfg: &GrpoConfig,
) -> Result<f64, GrpoError> {
    cfg.validate()?;
    let g = group.rewards.len();
    if advantages.values.len() != g {
        return Err(GrpoError::LengthMismatch(advantages.values.len(), g));
    }
    if g == 0 {
        return Err(GrpoError::GroupTooSmall(0));
    }
    let kls: Vec<f64> = if group.logprobs.is_empty() {
        vec![0.0; g]
    } else {
        if group.logprobs.len() != g {
            return Err(GrpoError::LengthMismatch(group.logprobs.len(), g));
        }
        group.logprobs.iter().map(|lp| kl_per_trajectory(&lp.policy, &lp.reference)).collect::<Result<_, _>>()?
    };
    let sum: f64 = advantages.values.iter().zip(&kls).map(|(a, kl)| a - cfg.beta * kl).sum();
    Ok(-sum / g as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterEntry {
    pub id: String,
    pub total: f64,
    pub advantage: f64,
    /// Component rewards minus the group mean, in
    /// `[acc, fmt, think, cite, evid, sem]` order.
    pub component_deltas: [f64; 6],
}

/// Ranks a group of scored traces by advantage (descending, stable for
/// ties) and reports each component's deviation from the group mean.
pub fn differential_filter_report(
    entries: &[(String, RewardBreakdown)],
    cfg: &GrpoConfig,
) -> Result<Vec<FilterEntry>, GrpoError> {
    let totals: Vec<f64> = entries.iter().map(|(_, b)| b.total).collect();
    let adv = group_advantages(&totals, cfg)?;
    let n = entries.len() as f64;
    let mut means = [0.0; 6];
    for (_, b) in entries {
        for (m, c) in means.iter_mut().zip(b.components()) {
            *m += c / n;
        }
    }
    let mut out: Vec<FilterEntry> = entries
        .iter()
        .zip(&adv.values)
        .map(|((id, b), a)| {
            let mut deltas = b.components();
            deltas.iter_mut().zip(means).for_each(|(d, m)| *d -= m);
            FilterEntry { id: id.clone(), total: b.total, advantage: *a, component_deltas: deltas }
        })
        .collect();
    out.sort_by(|x, y| y.advantage.total_cmp(&x.advantage));
    Ok(out)
}
